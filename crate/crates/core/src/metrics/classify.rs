use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::builtins::BuiltinRegistry;
use crate::pyast::{CallShape, CallSite, ImportBinding, ImportKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FunctionCategory {
    BuiltIn,
    UserDefined,
    Api,
    Other,
}

/// Assigns a call to one category, with precedence
/// user-defined > built-in > API > other.
///
/// `imports` and `user_defined` must cover the whole document: notebooks
/// commonly import or define in one cell and call in another.
pub fn classify_call(
    call: &CallSite,
    imports: &[ImportBinding],
    user_defined: &BTreeSet<String>,
    registry: &BuiltinRegistry,
) -> FunctionCategory {
    match call.shape {
        CallShape::PlainName => {
            let name = call.full_name.as_str();
            if user_defined.contains(name) {
                FunctionCategory::UserDefined
            } else if registry.is_function(name) {
                FunctionCategory::BuiltIn
            } else if imports
                .iter()
                .any(|b| b.kind == ImportKind::FromImport && b.bound_name == name)
            {
                FunctionCategory::Api
            } else {
                FunctionCategory::Other
            }
        }
        CallShape::DottedPath => {
            if !call.head.is_empty()
                && imports
                    .iter()
                    .any(|b| b.kind == ImportKind::ModuleImport && b.bound_name == call.head)
            {
                FunctionCategory::Api
            } else {
                FunctionCategory::Other
            }
        }
    }
}
