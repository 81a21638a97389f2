use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geom::SteeringAngles;

use super::ArrayConfig;

/// Binary on/off state of every RF chain, `rows × cols` with rows along `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ActivationMask {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl ActivationMask {
    pub fn new(rows: usize, cols: usize, cells: Vec<bool>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::Contract(format!(
                "mask of {rows}×{cols} needs {} cells, got {}",
                rows * cols,
                cells.len()
            )));
        }
        Ok(Self { rows, cols, cells })
    }

    pub fn filled(rows: usize, cols: usize, on: bool) -> Self {
        Self {
            rows,
            cols,
            cells: vec![on; rows * cols],
        }
    }

    pub fn all_active(config: &ArrayConfig) -> Self {
        Self::filled(config.subarray_count_x, config.subarray_count_y, true)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.cells[row * self.cols + col] = on;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn active_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// True when the mask is mirror-symmetric about both centre lines.
    pub fn is_quadrant_symmetric(&self) -> bool {
        let (p, q) = (self.rows, self.cols);
        (0..p).all(|i| {
            (0..q).all(|j| {
                let v = self.get(i, j);
                v == self.get(p - 1 - i, j) && v == self.get(i, q - 1 - j)
            })
        })
    }

    /// Renders `rows` lines of `cols` comma-separated 0/1 values, no header.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows * (2 * self.cols + 1));
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    out.push(',');
                }
                out.push(if self.get(i, j) { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format written by [`ActivationMask::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let mut n = 0;
            for (k, field) in line.split(',').enumerate() {
                let on = match field.trim() {
                    "0" => false,
                    "1" => true,
                    other => {
                        return Err(Error::parse(
                            format!("mask line {}, column {}", lineno + 1, k + 1),
                            format!("expected 0 or 1, found {other:?}"),
                        ))
                    }
                };
                cells.push(on);
                n += 1;
            }
            match cols {
                None => cols = Some(n),
                Some(c) if c != n => {
                    return Err(Error::parse(
                        format!("mask line {}", lineno + 1),
                        format!("expected {c} columns, found {n}"),
                    ))
                }
                _ => {}
            }
            rows += 1;
        }
        let cols = cols.ok_or_else(|| Error::parse("mask", "empty mask"))?;
        Self::new(rows, cols, cells)
    }

    /// Compact text rendering, `#` for active and `.` for inactive.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.push(if self.get(i, j) { '#' } else { '.' });
            }
            let _ = writeln!(s);
        }
        s
    }
}

/// Activation mask plus the steering direction realised through per-chain
/// progressive phase.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub mask: ActivationMask,
    pub steering: SteeringAngles,
}

impl WeightMatrix {
    pub fn new(mask: ActivationMask, steering: SteeringAngles) -> Self {
        Self { mask, steering }
    }

    pub fn broadside(mask: ActivationMask) -> Self {
        Self::new(mask, SteeringAngles::BROADSIDE)
    }

    pub fn check_dims(&self, config: &ArrayConfig) -> Result<()> {
        if self.mask.rows() != config.subarray_count_x || self.mask.cols() != config.subarray_count_y {
            return Err(Error::Contract(format!(
                "mask is {}×{} but the array has {}×{} subarrays",
                self.mask.rows(),
                self.mask.cols(),
                config.subarray_count_x,
                config.subarray_count_y
            )));
        }
        Ok(())
    }

    pub fn active_chains(&self) -> usize {
        self.mask.active_count()
    }
}
