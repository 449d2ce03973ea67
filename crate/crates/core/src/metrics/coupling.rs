use std::borrow::Borrow;
use std::collections::BTreeSet;

use num_traits::{FromPrimitive, Zero};

use super::CellMetricVector;
use crate::pyast::FunctionDef;

/// Mean size of the pairwise intersections over all unordered pairs of sets,
/// or zero when there are fewer than two sets.
///
/// Generic over the result type so callers can ask for an exact rational as
/// well as a float.
pub fn mean_pairwise_intersection<T, S>(sets: &[S]) -> T
where
    T: FromPrimitive + Zero + std::ops::Div<Output = T>,
    S: Borrow<BTreeSet<String>>,
{
    let n = sets.len();
    if n < 2 {
        return T::zero();
    }
    let mut total: u64 = 0;
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            total += a.borrow().intersection(b.borrow()).count() as u64;
        }
    }
    let pairs = (n * (n - 1) / 2) as u64;
    T::from_u64(total).expect("count fits the scalar type")
        / T::from_u64(pairs).expect("count fits the scalar type")
}

/// Average number of called functions shared by two user-defined functions.
pub fn function_coupling<T>(defs: &[FunctionDef]) -> T
where
    T: FromPrimitive + Zero + std::ops::Div<Output = T>,
{
    let sets: Vec<&BTreeSet<String>> = defs.iter().map(|d| &d.calls_inside).collect();
    mean_pairwise_intersection(&sets)
}

/// Average number of variables shared by two cells. Cells that failed to
/// parse do not take part.
pub fn cell_coupling<T>(cells: &[CellMetricVector]) -> T
where
    T: FromPrimitive + Zero + std::ops::Div<Output = T>,
{
    let sets: Vec<&BTreeSet<String>> = cells
        .iter()
        .filter(|c| c.parse_ok)
        .map(|c| &c.variables_used)
        .collect();
    mean_pairwise_intersection(&sets)
}
