//! Exact linear programming over the rationals.
//!
//! Dense two-phase simplex with Bland's rule (so termination is
//! guaranteed, no epsilon tolerances anywhere). Variables are implicitly
//! nonnegative; that matches the intended use, where variables are atom
//! masses of a finite probability space.
//!
//! On top of plain optimization, [`ratio_bounds`] computes the exact range
//! of an affine ratio num/den over a polytope intersected with finitely
//! many *open* conditions `g_j > 0` (conditional probabilities exist only
//! where their denominators are positive). The open region is handled via
//! convexity: it is dense in the closed relaxation when nonempty, so the
//! closed optimum gives the right bound, and the bound is attained iff the
//! optimal face contains a point with every `g_j` strictly positive.

use crate::rat::Rat;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint has {got} coefficients, system has {want} variables")]
    BadDimensions { got: usize, want: usize },
    #[error("simplex failed to terminate (internal error)")]
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// Σ coeffs·x REL rhs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl LinearConstraint {
    pub fn le(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        LinearConstraint { coeffs, rel: Rel::Le, rhs }
    }

    pub fn ge(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        LinearConstraint { coeffs, rel: Rel::Ge, rhs }
    }

    pub fn eq(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        LinearConstraint { coeffs, rel: Rel::Eq, rhs }
    }
}

/// Constraint system over `nvars` nonnegative variables.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    pub nvars: usize,
    pub constraints: Vec<LinearConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rat, point: Vec<Rat> },
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem { nvars, constraints: Vec::new() }
    }

    pub fn push(&mut self, c: LinearConstraint) {
        self.constraints.push(c);
    }

    fn check_dims(&self, coeffs: &[Rat]) -> Result<(), LpError> {
        if coeffs.len() != self.nvars {
            return Err(LpError::BadDimensions { got: coeffs.len(), want: self.nvars });
        }
        Ok(())
    }

    /// Any feasible point, or `None` when the system is infeasible.
    pub fn feasible_point(&self) -> Result<Option<Vec<Rat>>, LpError> {
        for c in &self.constraints {
            self.check_dims(&c.coeffs)?;
        }
        Ok(Tableau::phase1(self)?.map(|t| t.point(self.nvars)))
    }

    pub fn maximize(&self, objective: &[Rat]) -> Result<LpOutcome, LpError> {
        self.check_dims(objective)?;
        for c in &self.constraints {
            self.check_dims(&c.coeffs)?;
        }
        let Some(mut t) = Tableau::phase1(self)? else {
            return Ok(LpOutcome::Infeasible);
        };
        match t.optimize(objective)? {
            None => Ok(LpOutcome::Unbounded),
            Some(value) => Ok(LpOutcome::Optimal { value, point: t.point(self.nvars) }),
        }
    }

    pub fn minimize(&self, objective: &[Rat]) -> Result<LpOutcome, LpError> {
        let neg: Vec<Rat> = objective.iter().map(|c| -c).collect();
        Ok(match self.maximize(&neg)? {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
            other => other,
        })
    }
}

/// Simplex tableau: rows are basic-variable equations, `cost` is the
/// reduced-cost row of the current (maximization) objective.
struct Tableau {
    ncols: usize, // structural + slack + artificial columns
    nreal: usize, // structural + slack (artificials banned after phase 1)
    rows: Vec<Vec<Rat>>,
    rhs: Vec<Rat>,
    basis: Vec<usize>,
    cost: Vec<Rat>,
    cost_rhs: Rat,
}

const MAX_PIVOTS: usize = 200_000;

impl Tableau {
    /// Runs phase 1. `None` means infeasible; otherwise the returned
    /// tableau holds a basic feasible solution with artificials banned.
    fn phase1(sys: &LinearSystem) -> Result<Option<Tableau>, LpError> {
        let n = sys.nvars;
        let m = sys.constraints.len();
        let nslack = sys
            .constraints
            .iter()
            .filter(|c| c.rel != Rel::Eq)
            .count();
        // one artificial per row keeps the construction uniform
        let ncols = n + nslack + m;
        let mut rows = vec![vec![Rat::zero(); ncols]; m];
        let mut rhs = vec![Rat::zero(); m];
        let mut basis = vec![0usize; m];
        let mut slack_at = n;
        for (i, c) in sys.constraints.iter().enumerate() {
            let flip = c.rhs.is_negative();
            for (j, a) in c.coeffs.iter().enumerate() {
                rows[i][j] = if flip { -a } else { a.clone() };
            }
            rhs[i] = if flip { -&c.rhs } else { c.rhs.clone() };
            let rel = match (c.rel, flip) {
                (Rel::Eq, _) => Rel::Eq,
                (r, false) => r,
                (Rel::Le, true) => Rel::Ge,
                (Rel::Ge, true) => Rel::Le,
            };
            match rel {
                Rel::Le => {
                    rows[i][slack_at] = Rat::one();
                    slack_at += 1;
                }
                Rel::Ge => {
                    rows[i][slack_at] = -Rat::one();
                    slack_at += 1;
                }
                Rel::Eq => {}
            }
            let art = n + nslack + i;
            rows[i][art] = Rat::one();
            basis[i] = art;
        }
        let mut t = Tableau {
            ncols,
            nreal: n + nslack,
            rows,
            rhs,
            basis,
            cost: vec![Rat::zero(); ncols],
            cost_rhs: Rat::zero(),
        };
        // phase-1 objective: maximize −Σ artificials
        let mut obj = vec![Rat::zero(); ncols];
        for j in n + nslack..ncols {
            obj[j] = -Rat::one();
        }
        t.load_objective(&obj);
        let value = t.run_simplex(t.ncols)?.ok_or(LpError::Internal)?; // bounded above by 0
        if !value.is_zero() {
            return Ok(None);
        }
        t.evict_artificials();
        Ok(Some(t))
    }

    /// Installs an objective over the structural variables (extended by
    /// zeros) and prices it out against the current basis.
    fn load_objective(&mut self, obj: &[Rat]) {
        self.cost = obj.to_vec();
        self.cost.resize(self.ncols, Rat::zero());
        self.cost_rhs = Rat::zero();
        for i in 0..self.rows.len() {
            let cb = self.cost[self.basis[i]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                let delta = &cb * &self.rows[i][j];
                self.cost[j] = &self.cost[j] - &delta;
            }
            self.cost_rhs = &self.cost_rhs + &(&cb * &self.rhs[i]);
        }
    }

    /// Phase 2 on a priced-out tableau. Returns the optimal value, or
    /// `None` if unbounded.
    fn optimize(&mut self, objective: &[Rat]) -> Result<Option<Rat>, LpError> {
        let mut obj = objective.to_vec();
        obj.resize(self.ncols, Rat::zero());
        self.load_objective(&obj);
        self.run_simplex(self.nreal)
    }

    /// Bland's rule: entering column is the lowest-index improving one,
    /// leaving row has the minimal ratio with the lowest basis index on
    /// ties. Only columns `< col_limit` may enter.
    fn run_simplex(&mut self, col_limit: usize) -> Result<Option<Rat>, LpError> {
        for _ in 0..MAX_PIVOTS {
            let Some(enter) = (0..col_limit).find(|&j| self.cost[j].is_positive()) else {
                return Ok(Some(self.cost_rhs.clone()));
            };
            let mut leave: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if !self.rows[i][enter].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((leave, _)) = leave else {
                return Ok(None); // unbounded direction
            };
            self.pivot(leave, enter);
        }
        Err(LpError::Internal)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].clone().recip();
        for v in self.rows[row].iter_mut() {
            *v = &*v * &inv;
        }
        self.rhs[row] = &self.rhs[row] * &inv;
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                let delta = &factor * &self.rows[row][j];
                self.rows[i][j] = &self.rows[i][j] - &delta;
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[i] = &self.rhs[i] - &delta;
        }
        let factor = self.cost[col].clone();
        if !factor.is_zero() {
            for j in 0..self.ncols {
                let delta = &factor * &self.rows[row][j];
                self.cost[j] = &self.cost[j] - &delta;
            }
            self.cost_rhs = &self.cost_rhs + &(&factor * &self.rhs[row]);
        }
        self.basis[row] = col;
    }

    /// Pivots remaining zero-valued artificials out of the basis where a
    /// structural column is available; rows that admit none are redundant
    /// and stay parked on their artificial (banned from re-entering).
    fn evict_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.basis[i] < self.nreal {
                continue;
            }
            if let Some(col) = (0..self.nreal).find(|&j| !self.rows[i][j].is_zero()) {
                self.pivot(i, col);
            }
        }
    }

    fn point(&self, nvars: usize) -> Vec<Rat> {
        let mut x = vec![Rat::zero(); nvars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < nvars {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }
}

// ------------------------------------------------------------ affine ratios

/// coeffs·x + constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFn {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl AffineFn {
    pub fn new(coeffs: Vec<Rat>, constant: Rat) -> Self {
        AffineFn { coeffs, constant }
    }

    pub fn constant_fn(nvars: usize, c: Rat) -> Self {
        AffineFn { coeffs: vec![Rat::zero(); nvars], constant: c }
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (c, v) in self.coeffs.iter().zip(x) {
            acc = &acc + &(c * v);
        }
        acc
    }
}

/// Exact range of num/den over the admissible region, with attainment
/// flags and admissible witness points where attained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioBounds {
    pub lower: Rat,
    pub upper: Rat,
    pub lower_attained: bool,
    pub upper_attained: bool,
    pub lower_witness: Option<Vec<Rat>>,
    pub upper_witness: Option<Vec<Rat>>,
}

/// Bounds of `num/den` over O = feasible(sys) ∩ {den > 0} ∩ {g > 0 : g ∈
/// strict}.
///
/// Preconditions: the feasible set is bounded (probability systems always
/// contain Σ atoms = 1), every strict functional is nonnegative on it, and
/// the ratio is bounded on O (all hold for conditional probabilities: the
/// numerator event sits inside the denominator event). The closed
/// relaxations `g ≥ 0` are added to the system, making O dense in the
/// relaxed polytope.
///
/// Returns `None` when O is empty — either the closed system is
/// infeasible or some strict condition can't be made positive.
pub fn ratio_bounds(
    sys: &LinearSystem,
    strict: &[AffineFn],
    num: &AffineFn,
    den: &AffineFn,
) -> Result<Option<RatioBounds>, LpError> {
    let n = sys.nvars;
    let mut opens: Vec<AffineFn> = Vec::with_capacity(strict.len() + 1);
    opens.push(den.clone());
    opens.extend(strict.iter().cloned());

    // closed relaxation: g ≥ 0 for every open condition
    let mut closed = sys.clone();
    for g in &opens {
        closed.push(LinearConstraint::ge(g.coeffs.clone(), -&g.constant));
    }
    // O nonempty ⟺ every open condition has positive maximum over the
    // relaxation (convexity: the average of per-condition maximizers is
    // then strictly admissible)
    for g in &opens {
        match closed.maximize(&g.coeffs)? {
            LpOutcome::Infeasible => return Ok(None),
            LpOutcome::Unbounded => {}
            LpOutcome::Optimal { value, .. } => {
                if !(&value + &g.constant).is_positive() {
                    return Ok(None);
                }
            }
        }
    }

    // Charnes–Cooper: y = t·x, t > 0, normalized by den·y + den_const·t = 1.
    // Constraints homogenize (rhs b becomes −b·t ≤ 0 etc.); open conditions
    // transform to ĝ(y,t) = g.coeffs·y + g.constant·t > 0. Variable layout:
    // y_0..y_{n-1}, then t.
    let mut cc = LinearSystem::new(n + 1);
    for c in &closed.constraints {
        let mut coeffs = c.coeffs.clone();
        coeffs.push(-&c.rhs);
        cc.push(LinearConstraint { coeffs, rel: c.rel, rhs: Rat::zero() });
    }
    let mut norm = den.coeffs.clone();
    norm.push(den.constant.clone());
    cc.push(LinearConstraint::eq(norm, Rat::one()));
    let hat = |g: &AffineFn| -> Vec<Rat> {
        let mut v = g.coeffs.clone();
        v.push(g.constant.clone());
        v
    };
    let mut objective = num.coeffs.clone();
    objective.push(num.constant.clone());

    // a face point where f is positive, or None if f ≤ 0 on the whole face.
    // The transformed set is unbounded in t whenever den vanishes somewhere
    // on the polytope, so maximizations over a face may come back Unbounded;
    // that still means "positive value achievable" and a witness comes from
    // a feasibility solve with f ≥ 1 adjoined.
    let positive_point =
        |face: &LinearSystem, f: Vec<Rat>| -> Result<Option<Vec<Rat>>, LpError> {
            match face.maximize(&f)? {
                LpOutcome::Optimal { value, point } => {
                    Ok(if value.is_positive() { Some(point) } else { None })
                }
                LpOutcome::Unbounded => {
                    let mut bumped = face.clone();
                    bumped.push(LinearConstraint::ge(f, Rat::one()));
                    Ok(Some(bumped.feasible_point()?.ok_or(LpError::Internal)?))
                }
                LpOutcome::Infeasible => Err(LpError::Internal),
            }
        };

    let solve_side = |maximize: bool| -> Result<(Rat, bool, Option<Vec<Rat>>), LpError> {
        let outcome = if maximize {
            cc.maximize(&objective)?
        } else {
            cc.minimize(&objective)?
        };
        let LpOutcome::Optimal { value, .. } = outcome else {
            // infeasibility was excluded above; unboundedness of the
            // objective itself can't occur when the ratio is bounded on O
            return Err(LpError::Internal);
        };
        // attainment: does the optimal face meet every open condition?
        let mut face = cc.clone();
        face.push(LinearConstraint::eq(objective.clone(), value.clone()));
        let mut maximizers: Vec<Vec<Rat>> = Vec::new();
        for g in &opens {
            match positive_point(&face, hat(g))? {
                Some(p) => maximizers.push(p),
                None => return Ok((value, false, None)),
            }
        }
        // t > 0 must hold too (t = 0 would be a point at infinity)
        let mut tobj = vec![Rat::zero(); n + 1];
        tobj[n] = Rat::one();
        match positive_point(&face, tobj)? {
            Some(p) => maximizers.push(p),
            None => return Ok((value, false, None)),
        }
        let k = Rat::int(maximizers.len() as i64);
        let avg: Vec<Rat> = (0..n + 1)
            .map(|j| maximizers.iter().map(|p| &p[j]).sum::<Rat>() / &k)
            .collect();
        let t = avg[n].clone();
        let witness: Vec<Rat> = avg[..n].iter().map(|y| y / &t).collect();
        Ok((value, true, Some(witness)))
    };

    let (upper, upper_attained, upper_witness) = solve_side(true)?;
    let (lower, lower_attained, lower_witness) = solve_side(false)?;
    Ok(Some(RatioBounds {
        lower,
        upper,
        lower_attained,
        upper_attained,
        lower_witness,
        upper_witness,
    }))
}
