use std::collections::HashSet;
use std::sync::OnceLock;

/// Interpreter version the name lists below were taken from.
pub const LANGUAGE_VERSION: &str = "Python 3.10";

/// The built-in functions documented for Python 3.10.
const BUILTIN_FUNCTIONS: [&str; 71] = [
    "abs",
    "aiter",
    "all",
    "any",
    "anext",
    "ascii",
    "bin",
    "bool",
    "breakpoint",
    "bytearray",
    "bytes",
    "callable",
    "chr",
    "classmethod",
    "compile",
    "complex",
    "delattr",
    "dict",
    "dir",
    "divmod",
    "enumerate",
    "eval",
    "exec",
    "filter",
    "float",
    "format",
    "frozenset",
    "getattr",
    "globals",
    "hasattr",
    "hash",
    "help",
    "hex",
    "id",
    "input",
    "int",
    "isinstance",
    "issubclass",
    "iter",
    "len",
    "list",
    "locals",
    "map",
    "max",
    "memoryview",
    "min",
    "next",
    "object",
    "oct",
    "open",
    "ord",
    "pow",
    "print",
    "property",
    "range",
    "repr",
    "reversed",
    "round",
    "set",
    "setattr",
    "slice",
    "sorted",
    "staticmethod",
    "str",
    "sum",
    "super",
    "tuple",
    "type",
    "vars",
    "zip",
    "__import__",
];

/// Other names the builtins module provides: constants, site helpers,
/// exception classes, and module-level dunders every module has.
const OTHER_BUILTIN_NAMES: &[&str] = &[
    "Ellipsis",
    "NotImplemented",
    "__debug__",
    "copyright",
    "credits",
    "license",
    "exit",
    "quit",
    "__name__",
    "__file__",
    "__doc__",
    "__builtins__",
    "__spec__",
    "__loader__",
    "__package__",
    "__annotations__",
    "__cached__",
    "BaseException",
    "Exception",
    "ArithmeticError",
    "BufferError",
    "LookupError",
    "AssertionError",
    "AttributeError",
    "EOFError",
    "FloatingPointError",
    "GeneratorExit",
    "ImportError",
    "ModuleNotFoundError",
    "IndexError",
    "KeyError",
    "KeyboardInterrupt",
    "MemoryError",
    "NameError",
    "NotImplementedError",
    "OSError",
    "OverflowError",
    "RecursionError",
    "ReferenceError",
    "RuntimeError",
    "StopIteration",
    "StopAsyncIteration",
    "SyntaxError",
    "IndentationError",
    "TabError",
    "SystemError",
    "SystemExit",
    "TypeError",
    "UnboundLocalError",
    "UnicodeError",
    "UnicodeEncodeError",
    "UnicodeDecodeError",
    "UnicodeTranslateError",
    "ValueError",
    "ZeroDivisionError",
    "EnvironmentError",
    "IOError",
    "BlockingIOError",
    "ChildProcessError",
    "ConnectionError",
    "BrokenPipeError",
    "ConnectionAbortedError",
    "ConnectionRefusedError",
    "ConnectionResetError",
    "FileExistsError",
    "FileNotFoundError",
    "InterruptedError",
    "IsADirectoryError",
    "NotADirectoryError",
    "PermissionError",
    "ProcessLookupError",
    "TimeoutError",
    "Warning",
    "UserWarning",
    "DeprecationWarning",
    "PendingDeprecationWarning",
    "SyntaxWarning",
    "RuntimeWarning",
    "FutureWarning",
    "ImportWarning",
    "UnicodeWarning",
    "BytesWarning",
    "ResourceWarning",
    "EncodingWarning",
];

/// Fixed list of the runtime's built-in names, shared read-only.
#[derive(Debug)]
pub struct BuiltinRegistry {
    functions: HashSet<&'static str>,
    other: HashSet<&'static str>,
}

impl BuiltinRegistry {
    pub fn python310() -> &'static BuiltinRegistry {
        static REGISTRY: OnceLock<BuiltinRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| BuiltinRegistry {
            functions: BUILTIN_FUNCTIONS.iter().copied().collect(),
            other: OTHER_BUILTIN_NAMES.iter().copied().collect(),
        })
    }

    pub fn language_version(&self) -> &'static str {
        LANGUAGE_VERSION
    }

    /// Membership in the documented built-in functions.
    pub fn is_function(&self, name: &str) -> bool {
        self.functions.contains(name)
    }

    /// Any name resolvable without an import or assignment.
    pub fn is_builtin_name(&self, name: &str) -> bool {
        self.functions.contains(name) || self.other.contains(name)
    }

    pub fn function_names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.functions.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}
