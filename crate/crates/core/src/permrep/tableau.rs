use std::fmt;

use super::Partition;

/// A standard Young tableau. Entries are `1..=k`, rows and columns strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StandardTableau {
    shape: Partition,
    rows: Vec<Vec<usize>>,
}

impl StandardTableau {
    /// Validates a filling. Returns `None` unless it is a standard tableau.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Option<Self> {
        let shape = Partition::new(rows.iter().map(Vec::len).collect()).ok()?;
        let k = shape.weight();
        let mut seen = vec![false; k + 1];
        for row in &rows {
            for &x in row {
                if x == 0 || x > k || seen[x] {
                    return None;
                }
                seen[x] = true;
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if !row.windows(2).all(|w| w[0] < w[1]) {
                return None;
            }
            if i > 0 && row.iter().zip(&rows[i - 1]).any(|(below, above)| below <= above) {
                return None;
            }
        }
        Some(StandardTableau { shape, rows })
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Row and column (0-based) of entry `value` (1-based).
    pub fn position(&self, value: usize) -> (usize, usize) {
        for (r, row) in self.rows.iter().enumerate() {
            if let Some(c) = row.iter().position(|&x| x == value) {
                return (r, c);
            }
        }
        panic!("value {value} not in tableau");
    }

    /// Content `column - row` of the box holding `value`.
    pub fn content(&self, value: usize) -> i64 {
        let (r, c) = self.position(value);
        c as i64 - r as i64
    }

    /// The filling with `value` and `value + 1` exchanged (may not be standard).
    pub fn swapped(&self, value: usize) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| {
                        if x == value {
                            value + 1
                        } else if x == value + 1 {
                            value
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for StandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        write!(f, "[{}]", rows.join(" / "))
    }
}

/// All standard tableaux of shape `shape` in last-letter order.
///
/// Last-letter order sorts tableaux by the row holding `k` (top row first), ties
/// broken by the row holding `k - 1`, and so on down to `1`.
pub fn syt_enumerate(shape: &Partition) -> Vec<StandardTableau> {
    let mut out = Vec::new();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); shape.height()];
    let mut remaining = shape.parts().to_vec();
    place(shape.weight(), &mut remaining, &mut rows, &mut out, shape);
    out
}

// Fills values k, k-1, ..., 1 into removable corners, top rows first.
fn place(
    value: usize,
    remaining: &mut Vec<usize>,
    rows: &mut Vec<Vec<usize>>,
    out: &mut Vec<StandardTableau>,
    shape: &Partition,
) {
    if value == 0 {
        let filled = rows.iter().map(|r| r.iter().rev().copied().collect()).collect();
        out.push(StandardTableau { shape: shape.clone(), rows: filled });
        return;
    }
    for r in 0..remaining.len() {
        let len = remaining[r];
        let is_corner = len > 0 && (r + 1 == remaining.len() || remaining[r + 1] < len);
        if !is_corner {
            continue;
        }
        remaining[r] -= 1;
        rows[r].push(value);
        place(value - 1, remaining, rows, out, shape);
        rows[r].pop();
        remaining[r] += 1;
    }
}
