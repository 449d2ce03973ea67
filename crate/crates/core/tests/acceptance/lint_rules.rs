use std::fs;
use std::path::PathBuf;

use cellscope::ingest::{parse_script, read_document, CellDocument};
use cellscope::lint::{flatten, LintFinding, RULES};
use cellscope::metrics::{analyze_document, BuiltinRegistry};
use cellscope::pipeline::lint_document;

use crate::{verdict, Verdict};

struct RuleFixture {
    rule: &'static str,
    positive: &'static [&'static str],
    negative: &'static [&'static str],
}

const FIXTURES: [RuleFixture; 14] = [
    RuleFixture {
        rule: "WPS440",
        positive: &[
            "x = 1\nfor x in range(3):\n    pass\n",
            "for i in range(3):\n    pass\nfor i in range(4):\n    pass\n",
            "f = None\nwith open('p') as f:\n    pass\n",
            "err = 0\ntry:\n    pass\nexcept ValueError as err:\n    pass\n",
        ],
        negative: &[
            "for i in range(3):\n    pass\nfor j in range(3):\n    pass\n",
            "x = 1\nx = 2\nprint(x)\n",
            "with open('p') as f:\n    pass\n",
            "def g():\n    for k in range(2):\n        pass\n",
        ],
    },
    RuleFixture {
        rule: "NOEFFECT",
        positive: &[
            "x = 1\nx\n",
            "1 + 2\n",
            "def f(a):\n    a\n    return a\n",
            "[1, 2]\n",
        ],
        negative: &[
            "print(1)\n",
            "def f():\n    \"\"\"Doc.\"\"\"\n    return 1\n",
            "x = 1\n",
            "async def f(g):\n    await g()\n",
            "...\n",
        ],
    },
    RuleFixture {
        rule: "WPS442",
        positive: &[
            "df = 1\ndef f(df):\n    return df\n",
            "x = 1\ndef f():\n    x = 2\n    return x\n",
            "n = 0\ndef f():\n    for n in range(3):\n        pass\n",
        ],
        negative: &[
            "def f(a):\n    b = a\n    return b\n",
            "x = 1\ndef f():\n    global x\n    x = 2\n",
            "x = 1\ng = lambda x: x\n",
            "def f():\n    x = 1\n    return x\nx = 2\n",
        ],
    },
    RuleFixture {
        rule: "E0602",
        positive: &[
            "print(undefined_name)\n",
            "x = y + 1\n",
            "try:\n    pass\nexcept ValueError as e:\n    pass\nprint(e)\n",
            "class A:\n    b = c\n",
        ],
        negative: &[
            "x = 1\nprint(x)\n",
            "import os\nprint(os)\n",
            "from m import *\nprint(anything)\n",
            "def f():\n    return later\n",
        ],
    },
    RuleFixture {
        rule: "I201",
        positive: &[
            "import os\nprint(os)\n",
            "import os\nimport sys\nx = (os, sys)\n",
            "from a import b\nb()\n",
        ],
        negative: &[
            "import os\n\nprint(os)\n",
            "import os\nimport sys\n\nprint(os, sys)\n",
            "x = 1\n",
            "def f():\n    import os\n    return os\n",
        ],
    },
    RuleFixture {
        rule: "E231",
        positive: &["a = [1,2]\n", "f(1,2)\n", "d = {'a':1}\n", "x = 1;y = 2\n"],
        negative: &[
            "a = [1, 2]\n",
            "b = a[1:2]\n",
            "t = (1,)\n",
            "s = 'a,b'\n",
            "d = {'a': 1}\n",
        ],
    },
    RuleFixture {
        rule: "WPS301",
        positive: &[
            "import os.path\n\nprint(os)\n",
            "import a.b, c.d\n",
            "import xml.etree.ElementTree\n",
        ],
        negative: &[
            "import os\n",
            "import os.path as osp\n",
            "from os import path\n",
        ],
    },
    RuleFixture {
        rule: "E226",
        positive: &["x = 1+2\n", "y = 3*4\n", "z = 2**8\n", "w = 7//2\n"],
        negative: &[
            "x = 1 + 2\n",
            "y = -1\n",
            "z = f(*args)\n",
            "w = 2 ** 8\n",
            "def f(**kw):\n    return kw\n",
        ],
    },
    RuleFixture {
        rule: "C812",
        positive: &[
            "f(\n    1,\n    2\n)\n",
            "x = [\n    1,\n    2\n]\n",
            "d = {\n    'a': 1\n}\n",
            "t = (\n    1,\n    2\n)\n",
        ],
        negative: &[
            "f(\n    1,\n    2,\n)\n",
            "f(a,\n  b)\n",
            "x = (\n    a + b\n)\n",
            "x = [\n    i for i in y\n]\n",
            "f(\n    *args\n)\n",
        ],
    },
    RuleFixture {
        rule: "F401",
        positive: &[
            "import os\n",
            "from os import path\n",
            "import sys, json\n\nprint(sys)\n",
        ],
        negative: &[
            "import os\n\nprint(os)\n",
            "from __future__ import annotations\n",
            "import numpy as np\n",
            "from os import path\n\npath.exists('a')\n",
        ],
    },
    RuleFixture {
        rule: "W0611",
        positive: &[
            "import numpy as np\n",
            "from os import path as p\n",
            "import os.path as osp\n",
        ],
        negative: &[
            "import numpy as np\n\nnp.zeros(1)\n",
            "import os\n",
            "from os import path as p\n\np.join('a')\n",
        ],
    },
    RuleFixture {
        rule: "W0621",
        positive: &[
            "df = 1\ndef f(df):\n    return df\n",
            "def f():\n    x = 1\n    return x\nx = 2\n",
            "x = 1\ndef f():\n    x = 2\n    return x\n",
        ],
        negative: &[
            "def f(a):\n    b = a\n    return b\n",
            "x = 1\ndef f():\n    global x\n    x = 2\n",
            "x = 1\ng = lambda x: x\n",
            "def f(y):\n    return y\ndef g(y):\n    return y\n",
        ],
    },
    RuleFixture {
        rule: "WPS336",
        positive: &[
            "s = 'a' + 'b'\n",
            "name = 'x'\ns = 'hello ' + name\n",
            "s = name + f'{1}'\n",
            "b = b'x' + y\n",
        ],
        negative: &[
            "n = 1 + 2\n",
            "s = ''.join(['a', 'b'])\n",
            "s = f'{a}{b}'\n",
            "s = 'a' 'b'\n",
        ],
    },
    RuleFixture {
        rule: "R504",
        positive: &[
            "def f():\n    x = 1\n    return x\n",
            "def g(a):\n    r = a * 2\n    return r\n",
            "def h(a):\n    if a:\n        y = a\n        return y\n    return 0\n",
        ],
        negative: &[
            "def f():\n    return 1\n",
            "def g(a):\n    x = a\n    print(x)\n    return x\n",
            "def h(a):\n    x, y = a\n    return x\n",
            "def k(a):\n    x = a\n    return x + 1\n",
        ],
    },
];

fn lint(doc: &CellDocument, notebook_aware: bool) -> Vec<LintFinding> {
    let registry = BuiltinRegistry::python310();
    let analysis = analyze_document(doc, registry);
    lint_document(doc, &analysis, notebook_aware, registry)
}

fn lint_snippet(src: &str) -> Vec<LintFinding> {
    lint(&parse_script(src.as_bytes(), "snippet.py").unwrap(), false)
}

pub fn rule_fixtures() -> Verdict {
    let mut failures = Vec::new();
    let (mut positives, mut negatives) = (0, 0);
    for rule in RULES {
        if !FIXTURES.iter().any(|f| f.rule == rule.rule_id) {
            failures.push(format!("{} has no fixtures", rule.rule_id));
        }
    }
    for fixture in &FIXTURES {
        if fixture.positive.len() < 3 || fixture.negative.len() < 3 {
            failures.push(format!(
                "{} needs 3 positives and 3 negatives",
                fixture.rule
            ));
        }
        for (i, src) in fixture.positive.iter().enumerate() {
            positives += 1;
            if !lint_snippet(src).iter().any(|f| f.rule_id == fixture.rule) {
                failures.push(format!("{} missed positive {}", fixture.rule, i + 1));
            }
        }
        for (i, src) in fixture.negative.iter().enumerate() {
            negatives += 1;
            if lint_snippet(src).iter().any(|f| f.rule_id == fixture.rule) {
                failures.push(format!("{} fired on negative {}", fixture.rule, i + 1));
            }
        }
    }
    verdict(
        failures,
        format!(
            "{} rules, {positives} positive and {negatives} negative snippets",
            FIXTURES.len()
        ),
    )
}

fn suppression_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/suppression")
}

fn suppressed(findings: &[LintFinding]) -> usize {
    findings.iter().filter(|f| f.suppressed).count()
}

pub fn suppression() -> Verdict {
    let dir = suppression_dir();
    let notebook = match read_document(&dir.join("display.ipynb")) {
        Ok(d) => d,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let script = match read_document(&dir.join("display.py")) {
        Ok(d) => d,
        Err(e) => return Verdict::Fail(e.to_string()),
    };
    let mut failures = Vec::new();
    let script_bytes = fs::read_to_string(dir.join("display.py")).unwrap();
    if flatten(&notebook).text.trim_end() != script_bytes.trim_end() {
        failures.push("display.py is not the notebook's flat source".to_string());
    }
    let aware = suppressed(&lint(&notebook, true));
    let raw = suppressed(&lint(&notebook, false));
    let script_aware = suppressed(&lint(&script, true));
    let script_raw = suppressed(&lint(&script, false));
    for (what, got, want) in [
        ("notebook, aware", aware, 6),
        ("notebook, raw", raw, 0),
        ("script, aware", script_aware, 0),
        ("script, raw", script_raw, 0),
    ] {
        if got != want {
            failures.push(format!("{what}: {got} suppressed, expected {want}"));
        }
    }
    verdict(
        failures,
        format!(
            "suppressed: notebook {aware} aware / {raw} raw, script {script_aware} / {script_raw}"
        ),
    )
}
