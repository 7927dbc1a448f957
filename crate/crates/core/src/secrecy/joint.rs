use std::io::Write;

use serde::Serialize;

use super::xlog2x;
use crate::error::{Error, Result};
use crate::linalg::compensated_sum;

/// Absolute tolerance on total probability mass.
pub const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JointModel {
    IdealT1,
    IdealT2,
    CsEnsemble,
    Custom,
}

/// Rectangle of cells sharing one probability value.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub rows: std::ops::Range<usize>,
    pub cols: std::ops::Range<usize>,
    /// Probability of each individual cell in the rectangle.
    pub p: f64,
}

impl Block {
    fn area(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    fn overlaps(&self, other: &Block) -> bool {
        self.rows.start < other.rows.end
            && other.rows.start < self.rows.end
            && self.cols.start < other.cols.end
            && other.cols.start < self.cols.end
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    /// Row-major `t_x * t_y` table.
    Dense(Vec<f64>),
    /// Disjoint constant rectangles; uncovered cells are zero.
    Blocks(Vec<Block>),
}

/// Joint distribution of (message index, cryptogram index).
///
/// Large structured joints are stored as a few constant rectangles so that
/// their mutual information costs time proportional to the number of
/// rectangles rather than `t_x * t_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    t_x: usize,
    t_y: usize,
    storage: Storage,
    model: JointModel,
}

impl DiscreteJoint {
    pub fn dense(t_x: usize, t_y: usize, probs: Vec<f64>) -> Result<Self> {
        if t_x == 0 || t_y == 0 {
            return Err(Error::Validation(format!("joint must be non-empty, got {t_x}x{t_y}")));
        }
        if probs.len() != t_x * t_y {
            return Err(Error::Dimension(format!("{t_x}x{t_y} joint needs {} entries, got {}", t_x * t_y, probs.len())));
        }
        if let Some(i) = probs.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Validation(format!("joint entry ({}, {}) = {} is not a probability", i / t_y, i % t_y, probs[i])));
        }
        let j = Self { t_x, t_y, storage: Storage::Dense(probs), model: JointModel::Custom };
        j.check_mass()?;
        Ok(j)
    }

    pub fn from_blocks(t_x: usize, t_y: usize, blocks: Vec<Block>) -> Result<Self> {
        if t_x == 0 || t_y == 0 {
            return Err(Error::Validation(format!("joint must be non-empty, got {t_x}x{t_y}")));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.rows.end > t_x || b.cols.end > t_y || b.rows.is_empty() || b.cols.is_empty() {
                return Err(Error::Validation(format!("block {i} is empty or out of bounds")));
            }
            if !(b.p.is_finite() && b.p >= 0.0) {
                return Err(Error::Validation(format!("block {i} has invalid probability {}", b.p)));
            }
            if blocks[..i].iter().any(|o| o.overlaps(b)) {
                return Err(Error::Validation(format!("block {i} overlaps an earlier block")));
            }
        }
        let j = Self { t_x, t_y, storage: Storage::Blocks(blocks), model: JointModel::Custom };
        j.check_mass()?;
        Ok(j)
    }

    pub fn with_model(mut self, model: JointModel) -> Self {
        self.model = model;
        self
    }

    fn check_mass(&self) -> Result<()> {
        let total = self.total_mass();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Validation(format!("joint probabilities sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        match &self.storage {
            Storage::Dense(p) => compensated_sum(p.iter().copied()),
            Storage::Blocks(bs) => compensated_sum(bs.iter().map(|b| b.p * b.area() as f64)),
        }
    }

    pub fn t_x(&self) -> usize {
        self.t_x
    }

    pub fn t_y(&self) -> usize {
        self.t_y
    }

    pub fn model(&self) -> JointModel {
        self.model
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.t_x && y < self.t_y);
        match &self.storage {
            Storage::Dense(p) => p[x * self.t_y + y],
            Storage::Blocks(bs) => bs
                .iter()
                .find(|b| b.rows.contains(&x) && b.cols.contains(&y))
                .map_or(0.0, |b| b.p),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(p) => p.clone(),
            Storage::Blocks(bs) => {
                let mut out = vec![0.0; self.t_x * self.t_y];
                for b in bs {
                    for x in b.rows.clone() {
                        out[x * self.t_y + b.cols.start..x * self.t_y + b.cols.end].fill(b.p);
                    }
                }
                out
            }
        }
    }

    /// Same distribution in dense storage.
    pub fn densified(&self) -> Self {
        Self { t_x: self.t_x, t_y: self.t_y, storage: Storage::Dense(self.to_dense()), model: self.model }
    }

    pub fn row_marginal(&self) -> Vec<f64> {
        (0..self.t_x).map(|x| self.row_marginal_at(x)).collect()
    }

    pub fn col_marginal(&self) -> Vec<f64> {
        (0..self.t_y).map(|y| self.col_marginal_at(y)).collect()
    }

    /// One row per message, shortest round-trip decimals.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let dense = self.to_dense();
        let mut buf = ryu::Buffer::new();
        for row in dense.chunks(self.t_y) {
            let mut s = String::new();
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                s.push_str(buf.format(*v));
            }
            writeln!(w, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiReport {
    pub mi_bits: f64,
    pub h_x_bits: f64,
    pub h_y_bits: f64,
    pub h_y_given_x_bits: f64,
    pub model: JointModel,
}

/// Sorted cut points of a family of ranges over `0..len`.
fn cuts<'a, I: Iterator<Item = &'a std::ops::Range<usize>>>(len: usize, ranges: I) -> Vec<usize> {
    let mut c = vec![0, len];
    for r in ranges {
        c.push(r.start);
        c.push(r.end);
    }
    c.sort_unstable();
    c.dedup();
    c
}

/// Mutual information `sum p(x,y) log2(p(x,y) / (p(x) p(y)))` with
/// `0 log 0 = 0`, marginals taken from the table itself.
pub fn exact_mi(joint: &DiscreteJoint) -> MiReport {
    let (mi, h_x, h_y, h_xy) = match &joint.storage {
        Storage::Dense(p) => {
            let px = joint.row_marginal();
            let py = joint.col_marginal();
            let t_y = joint.t_y;
            let mi = compensated_sum(p.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, v)| {
                let (x, y) = (i / t_y, i % t_y);
                v * (v / (px[x] * py[y])).log2()
            }));
            let h_x = -compensated_sum(px.iter().map(|v| xlog2x(*v)));
            let h_y = -compensated_sum(py.iter().map(|v| xlog2x(*v)));
            let h_xy = -compensated_sum(p.iter().map(|v| xlog2x(*v)));
            (mi, h_x, h_y, h_xy)
        }
        Storage::Blocks(bs) => {
            // Between consecutive cut points every row (column) is covered by
            // the same blocks, so marginals are constant on each band.
            let rcuts = cuts(joint.t_x, bs.iter().map(|b| &b.rows));
            let ccuts = cuts(joint.t_y, bs.iter().map(|b| &b.cols));
            let row_bands: Vec<(usize, usize, f64)> = rcuts
                .windows(2)
                .map(|w| {
                    let m = joint.row_marginal_at(w[0]);
                    (w[0], w[1], m)
                })
                .collect();
            let col_bands: Vec<(usize, usize, f64)> = ccuts
                .windows(2)
                .map(|w| {
                    let m = joint.col_marginal_at(w[0]);
                    (w[0], w[1], m)
                })
                .collect();
            let mut terms = Vec::new();
            for b in bs.iter().filter(|b| b.p > 0.0) {
                for &(r0, r1, px) in row_bands.iter().filter(|(r0, r1, _)| *r0 >= b.rows.start && *r1 <= b.rows.end) {
                    for &(c0, c1, py) in
                        col_bands.iter().filter(|(c0, c1, _)| *c0 >= b.cols.start && *c1 <= b.cols.end)
                    {
                        let cells = ((r1 - r0) * (c1 - c0)) as f64;
                        terms.push(cells * b.p * (b.p / (px * py)).log2());
                    }
                }
            }
            let mi = compensated_sum(terms);
            let h_x = -compensated_sum(row_bands.iter().map(|(a, b, m)| (b - a) as f64 * xlog2x(*m)));
            let h_y = -compensated_sum(col_bands.iter().map(|(a, b, m)| (b - a) as f64 * xlog2x(*m)));
            let h_xy = -compensated_sum(bs.iter().map(|b| b.area() as f64 * xlog2x(b.p)));
            (mi, h_x, h_y, h_xy)
        }
    };
    MiReport { mi_bits: mi, h_x_bits: h_x, h_y_bits: h_y, h_y_given_x_bits: h_xy - h_x, model: joint.model }
}

impl DiscreteJoint {
    fn row_marginal_at(&self, x: usize) -> f64 {
        match &self.storage {
            Storage::Dense(p) => compensated_sum(p[x * self.t_y..(x + 1) * self.t_y].iter().copied()),
            Storage::Blocks(bs) => {
                compensated_sum(bs.iter().filter(|b| b.rows.contains(&x)).map(|b| b.p * b.cols.len() as f64))
            }
        }
    }

    fn col_marginal_at(&self, y: usize) -> f64 {
        match &self.storage {
            Storage::Dense(p) => compensated_sum((0..self.t_x).map(|x| p[x * self.t_y + y])),
            Storage::Blocks(bs) => {
                compensated_sum(bs.iter().filter(|b| b.cols.contains(&y)).map(|b| b.p * b.rows.len() as f64))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_joint_has_zero_mi() {
        let px = [0.2, 0.5, 0.3];
        let py = [0.1, 0.6, 0.3];
        let p: Vec<f64> = px.iter().flat_map(|a| py.iter().map(move |b| a * b)).collect();
        let r = exact_mi(&DiscreteJoint::dense(3, 3, p).unwrap());
        assert!(r.mi_bits.abs() < 1e-12, "{}", r.mi_bits);
    }

    #[test]
    fn identity_channel_on_four_symbols() {
        let mut p = vec![0.0; 16];
        for i in 0..4 {
            p[i * 4 + i] = 0.25;
        }
        let r = exact_mi(&DiscreteJoint::dense(4, 4, p).unwrap());
        assert!((r.mi_bits - 2.0).abs() < 1e-15);
        assert!((r.h_y_bits - r.h_y_given_x_bits - r.mi_bits).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(matches!(DiscreteJoint::dense(1, 2, vec![0.5, 0.6]), Err(Error::Validation(_))));
        assert!(matches!(DiscreteJoint::dense(1, 2, vec![1.5, -0.5]), Err(Error::Validation(_))));
        let overlapping = vec![Block { rows: 0..2, cols: 0..1, p: 0.25 }, Block { rows: 1..2, cols: 0..2, p: 0.25 }];
        assert!(DiscreteJoint::from_blocks(2, 2, overlapping).is_err());
    }

    #[test]
    fn block_and_dense_routes_agree() {
        let blocks = vec![
            Block { rows: 0..1, cols: 0..2, p: 0.1 },
            Block { rows: 1..4, cols: 1..3, p: 0.05 },
            Block { rows: 2..3, cols: 0..1, p: 0.2 },
            Block { rows: 3..4, cols: 3..5, p: 0.15 },
        ];
        let j = DiscreteJoint::from_blocks(4, 5, blocks).unwrap();
        let b = exact_mi(&j);
        let d = exact_mi(&j.densified());
        assert!((b.mi_bits - d.mi_bits).abs() < 1e-14);
        assert!((b.h_x_bits - d.h_x_bits).abs() < 1e-14);
        assert!((b.h_y_bits - d.h_y_bits).abs() < 1e-14);
        assert!((b.h_y_given_x_bits - d.h_y_given_x_bits).abs() < 1e-14);
        assert_eq!(j.get(2, 0), 0.2);
        assert_eq!(j.get(0, 4), 0.0);
    }

    #[test]
    fn csv_export() {
        let j = DiscreteJoint::dense(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let mut out = Vec::new();
        j.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0.5,0.0\n0.0,0.5\n");
    }
}
