//! Belief over the partner's movement transitions.
//!
//! Each (cell, movement) pair carries a Beta(α, β) posterior over whether
//! the partner can make that move. Observed partner moves add `c_plus` to α
//! of the taken action and `c_minus` to β of every sibling action at the
//! same cell.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{Action, Grid, GridPos};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceFactors {
    pub c_plus: f64,
    pub c_minus: f64,
}

impl Default for ConfidenceFactors {
    fn default() -> Self {
        ConfidenceFactors {
            c_plus: 2.0,
            c_minus: 0.5,
        }
    }
}

impl ConfidenceFactors {
    pub fn new(c_plus: f64, c_minus: f64) -> Result<Self> {
        let f = ConfidenceFactors { c_plus, c_minus };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_minus > 0.0 && self.c_plus > self.c_minus && self.c_plus.is_finite()) {
            return Err(Error::Domain(format!(
                "confidence factors need c_plus > c_minus > 0, got ({}, {})",
                self.c_plus, self.c_minus
            )));
        }
        Ok(())
    }
}

/// The partner's executed moves plus a read cursor marking how far the
/// owner's belief has already consumed them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartnerHistory {
    entries: Vec<(GridPos, Action)>,
    cursor: usize,
}

impl PartnerHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, cell: GridPos, action: Action) -> Result<()> {
        if !action.is_move() {
            return Err(Error::SwitchInHistory(action));
        }
        self.entries.push((cell, action));
        Ok(())
    }

    pub fn entries(&self) -> &[(GridPos, Action)] {
        &self.entries
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn unread(&self) -> &[(GridPos, Action)] {
        &self.entries[self.cursor..]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeliefTable {
    grid: Grid,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl BeliefTable {
    /// Uniform Beta(1, 1) over every (cell, movement) pair.
    pub fn new(width: u32, height: u32) -> Self {
        let grid = Grid::new(width, height);
        let n = grid.cell_count() * Action::MOVES.len();
        BeliefTable {
            grid,
            alpha: vec![1.0; n],
            beta: vec![1.0; n],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    fn slot(&self, p: GridPos, a: Action) -> usize {
        debug_assert!(a.is_move());
        self.grid.index(p) * 4 + a.index()
    }

    pub fn alpha(&self, p: GridPos, a: Action) -> f64 {
        self.alpha[self.slot(p, a)]
    }

    pub fn beta(&self, p: GridPos, a: Action) -> f64 {
        self.beta[self.slot(p, a)]
    }

    /// Overwrites the Beta parameters of one (cell, movement) pair.
    pub fn set(&mut self, p: GridPos, a: Action, alpha: f64, beta: f64) -> Result<()> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Domain(format!("Beta parameters must be positive, got ({alpha}, {beta})")));
        }
        let i = self.slot(p, a);
        self.alpha[i] = alpha;
        self.beta[i] = beta;
        Ok(())
    }

    /// Posterior mean b(x, a). `Switch` is always feasible.
    pub fn mean(&self, p: GridPos, a: Action) -> f64 {
        if !a.is_move() {
            return 1.0;
        }
        let i = self.slot(p, a);
        self.alpha[i] / (self.alpha[i] + self.beta[i])
    }

    /// Means for every (cell index * 4 + direction) slot.
    pub fn means(&self) -> Vec<f64> {
        self.alpha
            .iter()
            .zip(&self.beta)
            .map(|(a, b)| a / (a + b))
            .collect()
    }

    /// Applies one observed partner move.
    pub fn observe(&mut self, cell: GridPos, action: Action, factors: &ConfidenceFactors) {
        for other in Action::MOVES {
            let i = self.slot(cell, other);
            if other == action {
                self.alpha[i] += factors.c_plus;
            } else {
                self.beta[i] += factors.c_minus;
            }
        }
    }

    /// Consumes the unread part of `history` and advances its cursor.
    pub fn ingest_history(&mut self, history: &mut PartnerHistory, factors: &ConfidenceFactors) {
        for &(cell, action) in history.unread() {
            self.observe(cell, action, factors);
        }
        history.cursor = history.entries.len();
    }

    pub fn export(&self) -> BeliefExport {
        let mut out = BTreeMap::new();
        for p in self.grid.cells() {
            for a in Action::MOVES {
                let key = format!("{},{},{}", p.col, p.row, a.code());
                out.insert(
                    key,
                    BeliefEntry {
                        alpha: self.alpha(p, a),
                        beta: self.beta(p, a),
                        mean: self.mean(p, a),
                    },
                );
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefEntry {
    pub alpha: f64,
    pub beta: f64,
    pub mean: f64,
}

/// Wire form keyed by `"col,row,dir"`.
pub type BeliefExport = BTreeMap<String, BeliefEntry>;

/// Posterior mean after one weighted observation `y` (true = transition seen).
pub fn posterior_mean(alpha: f64, beta: f64, y: bool, factors: &ConfidenceFactors) -> f64 {
    let y = if y { 1.0 } else { 0.0 };
    let a = alpha + factors.c_plus * y;
    let b = beta + factors.c_minus * (1.0 - y);
    a / (a + b)
}

/// The `c_plus` that makes the weighted likelihood normalize for a given
/// θ and `c_minus`, i.e. `(1-θ)^c_minus + θ^c_plus = 1`.
pub fn constraint_c_plus(theta: f64, c_minus: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    if !(c_minus > 0.0 && c_minus.is_finite()) {
        return Err(Error::Domain(format!("c_minus must be positive, got {c_minus}")));
    }
    // 1 - (1-θ)^c, computed without cancellation.
    let rest = -(c_minus * (-theta).ln_1p()).exp_m1();
    Ok(rest.ln() / theta.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    const F: ConfidenceFactors = ConfidenceFactors {
        c_plus: 2.0,
        c_minus: 0.5,
    };

    #[test]
    fn uniform_init() {
        let t = BeliefTable::new(9, 9);
        assert_eq!(t.len(), 81 * 4);
        assert!(t.means().iter().all(|&m| m == 0.5));
        assert_eq!(t, BeliefTable::new(9, 9));
    }

    #[test]
    fn single_observation() {
        let mut t = BeliefTable::new(3, 3);
        let mut h = PartnerHistory::new();
        h.push(GridPos::new(0, 0), Action::Right).unwrap();
        t.ingest_history(&mut h, &F);
        assert_eq!(t.mean(GridPos::new(0, 0), Action::Right), 0.75);
        assert_eq!(t.mean(GridPos::new(0, 0), Action::Up), 0.4);
        assert_eq!(t.mean(GridPos::new(1, 0), Action::Left), 0.5);
        assert_eq!(h.cursor(), 1);
    }

    #[test]
    fn cursor_prevents_double_counting() {
        let mut t = BeliefTable::new(3, 3);
        let mut h = PartnerHistory::new();
        h.push(GridPos::new(1, 1), Action::Up).unwrap();
        t.ingest_history(&mut h, &F);
        let snapshot = t.clone();
        t.ingest_history(&mut h, &F);
        assert_eq!(t, snapshot);
    }

    #[test]
    fn repeated_evidence_closed_form() {
        let mut t = BeliefTable::new(2, 2);
        let p = GridPos::new(0, 0);
        for k in 1..=20 {
            t.observe(p, Action::Right, &F);
            let k = k as f64;
            let expected = (1.0 + k * F.c_plus) / (2.0 + k * F.c_plus);
            assert!((t.mean(p, Action::Right) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn switch_rejected_from_history() {
        let mut h = PartnerHistory::new();
        assert!(h.push(GridPos::new(0, 0), Action::Switch).is_err());
        assert!(h.is_empty());
    }

    #[test]
    fn posterior_examples() {
        assert_eq!(posterior_mean(1.0, 1.0, true, &F), 0.75);
        assert_eq!(posterior_mean(1.0, 1.0, false, &F), 0.4);
        let zero = ConfidenceFactors {
            c_plus: 0.0,
            c_minus: 0.0,
        };
        assert_eq!(posterior_mean(3.0, 5.0, true, &zero), 3.0 / 8.0);
        assert_eq!(posterior_mean(3.0, 5.0, false, &zero), 3.0 / 8.0);
    }

    #[test]
    fn c_plus_constraint() {
        for theta in [0.01, 0.3, 0.5, 0.77, 0.99] {
            assert!((constraint_c_plus(theta, 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        // Root of 0.5^0.5 + 0.5^c = 1, solved by bisection.
        let (mut lo, mut hi) = (0.0f64, 10.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 0.5f64.powf(0.5) + 0.5f64.powf(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c = constraint_c_plus(0.5, 0.5).unwrap();
        assert!((c - lo).abs() < 1e-12);
        assert!((c - 1.7716).abs() < 1e-4);
        assert!(constraint_c_plus(0.0, 0.5).is_err());
        assert!(constraint_c_plus(1.0, 0.5).is_err());
    }

    #[test]
    fn factor_validation() {
        assert!(ConfidenceFactors::new(2.0, 0.5).is_ok());
        assert!(ConfidenceFactors::new(0.5, 0.5).is_err());
        assert!(ConfidenceFactors::new(1.0, 0.0).is_err());
    }

    #[test]
    fn export_keys() {
        let t = BeliefTable::new(2, 1);
        let e = t.export();
        assert_eq!(e.len(), 8);
        assert_eq!(e["1,0,L"].mean, 0.5);
    }
}
