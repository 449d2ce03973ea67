use cellscope::ingest::{parse_script, CellDocument, CellType};
use cellscope::metrics::{
    analyze_document, BuiltinRegistry, DocumentContext, FunctionCategory, ParsedCell,
};

use crate::{verdict, Verdict};

use FunctionCategory::{Api, BuiltIn, Other, UserDefined};

/// Snippets with a McCabe count applied by hand.
const CYCLOMATIC: [(&str, u32); 20] = [
    ("x = 1\n", 1),
    ("if a:\n    pass\n", 2),
    ("if a:\n    pass\nelif b:\n    pass\nelse:\n    pass\n", 3),
    ("for i in x:\n    pass\n", 2),
    ("for i in x:\n    pass\nelse:\n    pass\n", 2),
    ("while a:\n    pass\n", 2),
    ("try:\n    pass\nexcept A:\n    pass\nexcept B:\n    pass\nfinally:\n    pass\n", 3),
    ("assert a\n", 2),
    ("y = a if b else c\n", 2),
    ("y = [i for i in x if i if i > 2]\n", 3),
    ("y = a and b\n", 2),
    ("y = a or b or c\n", 3),
    ("y = (a and b) or c\n", 3),
    ("match p:\n    case 1:\n        pass\n    case 2:\n        pass\n    case _:\n        pass\n", 4),
    ("def f(x):\n    if x:\n        return 1\n    return 2\n", 2),
    ("f = lambda v: v if v else 0\n", 2),
    ("async def g(s):\n    async for i in s:\n        pass\n", 2),
    ("with open(p) as fh:\n    data = fh.read()\n", 1),
    ("d = {k: v for k, v in items if v}\ns = {i for i in x if i}\ng = (i for i in x if i)\n", 4),
    ("for i in x:\n    while i:\n        if i and j:\n            break\n", 5),
];

pub fn cyclomatic() -> Verdict {
    let registry = BuiltinRegistry::python310();
    let mut failures = Vec::new();
    for (i, (src, want)) in CYCLOMATIC.iter().enumerate() {
        let doc = parse_script(src.as_bytes(), "snippet.py").unwrap();
        let got = analyze_document(&doc, registry).metrics.cyclomatic;
        if got != Some(*want) {
            failures.push(format!("snippet {}: expected {want}, got {got:?}", i + 1));
        }
    }
    verdict(failures, format!("{} snippets", CYCLOMATIC.len()))
}

struct Case {
    cells: &'static [&'static str],
    /// Every call site of the document as (callee, category).
    calls: &'static [(&'static str, FunctionCategory)],
}

const CASES: [Case; 7] = [
    // Imports and definitions in earlier cells apply to later cells.
    Case {
        cells: &[
            "import numpy as np\nimport os.path\nimport pandas as pd\nfrom math import sqrt, floor as fl\nfrom sklearn import *",
            "def helper(x):\n    return x\n\ndef len(s):\n    return 0",
            "np.array([1])\nnp.linalg.norm(v)\nos.path.join('a')\npd.read_csv('f')\nsqrt(2)\nfl(2.5)\nfloor(2.5)\nhelper(1)\nlen([])\nprint(1)\nabs(-1)\nKMeans()\ndf.head()\nhelper.cache_clear()\nmath.sqrt(4)\nstr(1).upper()\nnumpy.array(1)\npd.DataFrame(d).describe()\nundefined_fn()\nx[0]()",
        ],
        calls: &[
            ("np.array", Api),
            ("np.linalg.norm", Api),
            ("os.path.join", Api),
            ("pd.read_csv", Api),
            ("sqrt", Api),
            ("fl", Api),
            ("floor", Other),
            ("helper", UserDefined),
            ("len", UserDefined),
            ("print", BuiltIn),
            ("abs", BuiltIn),
            ("KMeans", Other),
            ("df.head", Other),
            ("helper.cache_clear", Other),
            ("math.sqrt", Other),
            ("<expr>.upper", Other),
            ("str", BuiltIn),
            ("numpy.array", Other),
            ("<expr>.describe", Other),
            ("pd.DataFrame", Api),
            ("undefined_fn", Other),
            ("<expr>", Other),
        ],
    },
    // A definition wins over a from-import of the same name.
    Case {
        cells: &[
            "from os import getcwd\nimport json",
            "def getcwd():\n    return '.'\ndef json_load():\n    return json.loads('1')",
            "getcwd()\njson_load()\njson.dumps({})\nopen('f')\nsorted([])",
        ],
        calls: &[
            ("json.loads", Api),
            ("getcwd", UserDefined),
            ("json_load", UserDefined),
            ("json.dumps", Api),
            ("open", BuiltIn),
            ("sorted", BuiltIn),
        ],
    },
    // A built-in wins over a from-import of the same name.
    Case {
        cells: &["from numpy import sum, max as mx\nsum([1])\nmx([1])\nmin([1])\nmax([1])"],
        calls: &[("sum", BuiltIn), ("mx", Api), ("min", BuiltIn), ("max", BuiltIn)],
    },
    Case {
        cells: &[
            "import matplotlib.pyplot as plt\nimport matplotlib\nplt.plot(1)\nplt.figure().add_subplot(1)\nmatplotlib.use('Agg')\npyplot.show()",
        ],
        calls: &[
            ("plt.plot", Api),
            ("<expr>.add_subplot", Other),
            ("plt.figure", Api),
            ("matplotlib.use", Api),
            ("pyplot.show", Other),
        ],
    },
    // Attribute calls on a from-imported name are not module methods.
    Case {
        cells: &["from os import path\npath.exists('a')\npath('x')"],
        calls: &[("path.exists", Other), ("path", Api)],
    },
    Case {
        cells: &[
            "class Model:\n    def fit(self):\n        return self.score()\n    def score(self):\n        return 1",
            "m = Model()\nm.fit()\nfit()",
        ],
        calls: &[
            ("self.score", Other),
            ("Model", Other),
            ("m.fit", Other),
            ("fit", UserDefined),
        ],
    },
    Case {
        cells: &[
            "import re\nf = lambda s: re.sub('a', 'b', s)\nf('x')\nprint(list(map(f, range(3))))\ngetattr(re, 'compile')('x')",
        ],
        calls: &[
            ("re.sub", Api),
            ("f", Other),
            ("print", BuiltIn),
            ("list", BuiltIn),
            ("map", BuiltIn),
            ("range", BuiltIn),
            ("<expr>", Other),
            ("getattr", BuiltIn),
        ],
    },
];

pub fn classification() -> Verdict {
    let registry = BuiltinRegistry::python310();
    let mut failures = Vec::new();
    let mut sites = 0;
    let mut seen = std::collections::BTreeSet::new();
    for (i, case) in CASES.iter().enumerate() {
        let doc = CellDocument::notebook_from_cells(
            "calls.ipynb",
            case.cells.iter().map(|s| (CellType::Code, *s)),
        );
        let parsed: Vec<ParsedCell> = doc.code_cells().map(ParsedCell::new).collect();
        let context = DocumentContext::from_parsed(&parsed, registry);
        let mut got: Vec<(String, FunctionCategory)> = parsed
            .iter()
            .filter_map(|p| p.facts.as_ref())
            .flat_map(|f| f.calls.iter())
            .map(|c| (c.full_name.clone(), context.classify(c)))
            .collect();
        let mut want: Vec<(String, FunctionCategory)> = case
            .calls
            .iter()
            .map(|(n, c)| (n.to_string(), *c))
            .collect();
        got.sort();
        want.sort();
        sites += want.len();
        seen.extend(want.iter().map(|(_, c)| *c));
        if got != want {
            let wrong: Vec<_> = got.iter().filter(|g| !want.contains(g)).collect();
            failures.push(format!("case {}: unexpected {wrong:?}", i + 1));
        }
    }
    if sites < 50 {
        failures.push(format!("only {sites} call sites"));
    }
    if seen.len() != 4 {
        failures.push(format!("categories covered: {seen:?}"));
    }
    verdict(failures, format!("{sites} call sites"))
}
