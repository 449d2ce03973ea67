use crate::ingest::CellDocument;

/// Code cells joined with a single LF, plus the map from flat lines back to
/// cell-local lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatSource {
    pub text: String,
    /// `boundary[flat_line - 1] = (cell_index, local_line)`.
    boundary: Vec<(usize, usize)>,
}

impl FlatSource {
    /// Maps a 1-based flat line to `(cell_index, local_line)`.
    pub fn locate(&self, flat_line: usize) -> Option<(usize, usize)> {
        flat_line
            .checked_sub(1)
            .and_then(|i| self.boundary.get(i))
            .copied()
    }

    /// Inverse of [`FlatSource::locate`].
    pub fn flat_line(&self, cell_index: usize, local_line: usize) -> Option<usize> {
        // boundary is sorted by (cell, line), so binary search works
        self.boundary
            .binary_search(&(cell_index, local_line))
            .ok()
            .map(|i| i + 1)
    }

    pub fn line_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }
}

/// Concatenates the code cells in order. Every LF-separated segment of a cell
/// becomes one flat line, so the map is total and exactly invertible.
pub fn flatten(doc: &CellDocument) -> FlatSource {
    let mut text = String::new();
    let mut boundary = Vec::new();
    for (n, cell) in doc.code_cells().enumerate() {
        if n > 0 {
            text.push('\n');
        }
        text.push_str(&cell.source);
        let segments = cell.source.split('\n').count();
        boundary.extend((1..=segments).map(|line| (cell.index, line)));
    }
    FlatSource { text, boundary }
}
