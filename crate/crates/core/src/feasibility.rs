//! Existence of a joint observable as a convex feasibility problem.
//!
//! The unknown is a grid of `m × n` Hermitian blocks `J(x, y)`. It must lie
//! in the product of PSD cones and in the affine set fixed by the marginal
//! constraints. Dykstra's alternating projections look for a common point;
//! when the two sets are disjoint the gap between the iterates settles at a
//! positive value, which is reported as infeasibility.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, eigh, sqrt_psd, ComplexMatrix};
use crate::povm::Povm;
use crate::tol;

/// Row-major `m × n` grid of `d × d` blocks, `(x, y)` at `x * n + y`.
pub type Grid = Vec<ComplexMatrix>;

/// Relative residual change below which the residual counts as flat.
const PLATEAU_RELATIVE_CHANGE: f64 = 1e-6;

/// Iterations between recorded residual checkpoints.
const CHECKPOINT_STRIDE: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityProblem {
    dim: usize,
    a_effects: Vec<ComplexMatrix>,
    b_effects: Vec<ComplexMatrix>,
}

impl FeasibilityProblem {
    /// Both families must sum to the identity.
    pub fn new(a_effects: Vec<ComplexMatrix>, b_effects: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = a_effects
            .first()
            .map(|e| e.rows())
            .ok_or_else(|| Error::InvalidPovm("empty effect list".to_string()))?;
        if b_effects.is_empty() {
            return Err(Error::InvalidPovm("empty effect list".to_string()));
        }
        for e in a_effects.iter().chain(&b_effects) {
            linalg::check_same_square(e, dim)?;
            linalg::require_hermitian(e)?;
        }
        let id = ComplexMatrix::identity(dim);
        let gap_a = linalg::sum(&a_effects).expect("non-empty").distance(&id);
        let gap_b = linalg::sum(&b_effects).expect("non-empty").distance(&id);
        let gap = gap_a.max(gap_b);
        if gap > tol::TRACE {
            return Err(Error::InconsistentMarginals { gap });
        }
        Ok(Self {
            dim,
            a_effects,
            b_effects,
        })
    }

    pub fn from_povms(a: &Povm, b: &Povm) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        Self::new(a.effects().to_vec(), b.effects().to_vec())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a_effects(&self) -> &[ComplexMatrix] {
        &self.a_effects
    }

    pub fn b_effects(&self) -> &[ComplexMatrix] {
        &self.b_effects
    }

    /// `(m, n)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.a_effects.len(), self.b_effects.len())
    }

    /// `J₀(x, y) = √A(x) B(y) √A(x)`: PSD, with the A-marginal already exact.
    pub fn warm_start(&self) -> Result<Grid> {
        let mut grid = Vec::with_capacity(self.a_effects.len() * self.b_effects.len());
        for a in &self.a_effects {
            let r = sqrt_psd(a)?;
            for b in &self.b_effects {
                grid.push((&(&r * b) * &r).hermitian_part());
            }
        }
        Ok(grid)
    }

    /// Largest Frobenius deviation of a row or column sum from its target.
    pub fn marginal_residual(&self, grid: &[ComplexMatrix]) -> f64 {
        let (rows, cols) = self.marginal_defects(grid);
        rows.iter().chain(&cols).map(|r| r.frobenius_norm()).fold(0.0, f64::max)
    }

    /// Row defects `R_x = A(x) − Σ_y J(x,y)` and column defects
    /// `C_y = B(y) − Σ_x J(x,y)`.
    fn marginal_defects(&self, grid: &[ComplexMatrix]) -> (Vec<ComplexMatrix>, Vec<ComplexMatrix>) {
        let n = self.b_effects.len();
        let mut rows = self.a_effects.clone();
        let mut cols = self.b_effects.clone();
        for (k, block) in grid.iter().enumerate() {
            rows[k / n] -= block;
            cols[k % n] -= block;
        }
        (rows, cols)
    }

    fn check_grid(&self, grid: &[ComplexMatrix]) -> Result<()> {
        let (m, n) = self.shape();
        if grid.len() != m * n {
            return Err(Error::BadShape {
                rows: m,
                cols: n,
                found: grid.len(),
            });
        }
        for block in grid {
            linalg::check_same_square(block, self.dim)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub tol_feasible: f64,
    pub band_upper: f64,
    pub plateau_window: usize,
    /// Recorded in reports. The solver itself draws no random numbers.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iter: 20_000,
            tol_feasible: 1e-7,
            band_upper: 1e-4,
            plateau_window: 500,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_feasible > 0.0 && self.tol_feasible < self.band_upper) {
            return Err(Error::InvalidOptions(format!(
                "need 0 < tol_feasible < band_upper, got {:e} and {:e}",
                self.tol_feasible, self.band_upper
            )));
        }
        if self.max_iter == 0 || self.plateau_window == 0 {
            return Err(Error::InvalidOptions(
                "max_iter and plateau_window must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Feasible,
    Infeasible,
    Indeterminate,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Feasible => "feasible",
            Self::Infeasible => "infeasible",
            Self::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Smallest block eigenvalue of the returned grid.
    pub min_eigenvalue: f64,
    /// Largest marginal defect of the returned grid.
    pub marginal_residual: f64,
    /// Whether the plateau test fired.
    pub plateau: bool,
    /// `(iteration, residual)` every hundred iterations.
    pub history: Vec<(usize, f64)>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOutcome {
    pub status: SolverStatus,
    /// Frobenius gap between the cone iterate and its affine projection.
    pub residual: f64,
    /// Last affine iterate; satisfies the marginals to rounding.
    pub grid: Grid,
    pub iterations: usize,
    pub diagnostics: Diagnostics,
}

/// Orthogonal projection onto the marginal constraints:
/// `J(x,y) += R_x/n + C_y/m − S/(mn)` with `S = Σ_x R_x`.
pub fn project_affine_marginals(problem: &FeasibilityProblem, grid: &[ComplexMatrix]) -> Result<Grid> {
    problem.check_grid(grid)?;
    Ok(affine_projection(problem, grid))
}

fn affine_projection(problem: &FeasibilityProblem, grid: &[ComplexMatrix]) -> Grid {
    let (m, n) = problem.shape();
    let (rows, cols) = problem.marginal_defects(grid);
    let s = linalg::sum(&rows).expect("non-empty");
    let mut out = grid.to_vec();
    for (k, block) in out.iter_mut().enumerate() {
        block.add_scaled(1.0 / n as f64, &rows[k / n]);
        block.add_scaled(1.0 / m as f64, &cols[k % n]);
        block.add_scaled(-1.0 / (m * n) as f64, &s);
    }
    out
}

/// Nearest PSD grid: each block's negative eigenvalues are clipped to zero.
pub fn project_psd_cone(grid: &[ComplexMatrix]) -> Result<Grid> {
    grid.iter().map(|b| clip_below(b, 0.0)).collect()
}

/// Nearest matrix with spectrum in `[floor, ∞)`.
fn clip_below(block: &ComplexMatrix, floor: f64) -> Result<ComplexMatrix> {
    let e = eigh(block)?;
    if e.min_value() >= floor {
        return Ok(block.hermitian_part());
    }
    Ok(e.map_values(|v| v.max(floor)))
}

fn min_block_eigenvalue(grid: &[ComplexMatrix]) -> Result<f64> {
    let mut min = f64::INFINITY;
    for b in grid {
        min = min.min(eigh(b)?.min_value());
    }
    Ok(min)
}

fn grid_distance(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    libm::sqrt(
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).frobenius_norm_sqr())
            .sum::<f64>(),
    )
}

/// Dykstra iteration between the cone `{J(x,y) ⪰ margin·1}` and the affine
/// marginal set. Only the cone step carries a correction term; the affine
/// step is a plain projection.
#[derive(Debug, Clone)]
pub struct Dykstra<'a> {
    problem: &'a FeasibilityProblem,
    margin: f64,
    x: Grid,
    correction: Grid,
    residual: f64,
    iterations: usize,
}

impl<'a> Dykstra<'a> {
    pub fn new(problem: &'a FeasibilityProblem, start: Grid, margin: f64) -> Result<Self> {
        problem.check_grid(&start)?;
        let x = affine_projection(problem, &start);
        let zero = ComplexMatrix::zeros(problem.dim, problem.dim);
        let correction = alloc::vec![zero; x.len()];
        let residual = grid_distance(&x, &start);
        Ok(Self {
            problem,
            margin,
            x,
            correction,
            residual,
            iterations: 0,
        })
    }

    /// One cone step and one affine step; returns the new gap.
    pub fn step(&mut self) -> Result<f64> {
        let mut cone = Vec::with_capacity(self.x.len());
        for (x, p) in self.x.iter().zip(self.correction.iter_mut()) {
            let shifted = x + &*p;
            let y = clip_below(&shifted, self.margin)?;
            *p = &shifted - &y;
            cone.push(y);
        }
        self.x = affine_projection(self.problem, &cone);
        self.residual = grid_distance(&self.x, &cone);
        self.iterations += 1;
        Ok(self.residual)
    }

    /// Current affine iterate.
    pub fn iterate(&self) -> &Grid {
        &self.x
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn into_iterate(self) -> Grid {
        self.x
    }
}

/// Decides whether the problem has a PSD solution.
///
/// The cone is shifted by `tol_feasible`, so once the gap drops below
/// `tol_feasible` the affine iterate is strictly positive and is returned as
/// the certificate. Iterates are also tested against the unshifted cone
/// every hundred steps, which catches solutions on the cone boundary.
pub fn dykstra_solve(problem: &FeasibilityProblem, opts: &SolverOptions) -> Result<SolverOutcome> {
    opts.validate()?;
    let start = problem.warm_start()?;
    let mut solver = Dykstra::new(problem, start, opts.tol_feasible)?;
    let mut history = alloc::vec![(0, solver.residual())];
    let mut window: VecDeque<f64> = VecDeque::with_capacity(opts.plateau_window + 1);

    if min_block_eigenvalue(solver.iterate())? >= -tol::PSD {
        solver.residual = 0.0;
        return finish(problem, solver, SolverStatus::Feasible, false, history, "start point is feasible");
    }

    while solver.iterations() < opts.max_iter {
        let r = solver.step()?;
        let k = solver.iterations();
        if k % CHECKPOINT_STRIDE == 0 {
            history.push((k, r));
        }
        if r < opts.tol_feasible || k % CHECKPOINT_STRIDE == 0 {
            let min_eig = min_block_eigenvalue(solver.iterate())?;
            if min_eig >= -tol::PSD {
                return finish(problem, solver, SolverStatus::Feasible, false, history, "converged");
            }
        }
        window.push_back(r);
        if window.len() > opts.plateau_window {
            let old = window.pop_front().expect("non-empty");
            if r > opts.band_upper && (old - r).abs() <= PLATEAU_RELATIVE_CHANGE * r {
                return finish(problem, solver, SolverStatus::Infeasible, true, history, "residual plateau");
            }
        }
    }

    let r = solver.residual();
    let message = if r < opts.tol_feasible {
        "max_iter reached; gap closed but iterate not positive"
    } else if r <= opts.band_upper {
        "max_iter reached inside the indeterminate band"
    } else {
        "max_iter reached above the band without a plateau"
    };
    finish(problem, solver, SolverStatus::Indeterminate, false, history, message)
}

fn finish(
    problem: &FeasibilityProblem,
    solver: Dykstra<'_>,
    status: SolverStatus,
    plateau: bool,
    history: Vec<(usize, f64)>,
    message: &str,
) -> Result<SolverOutcome> {
    let residual = solver.residual();
    let iterations = solver.iterations();
    let grid: Grid = solver.into_iterate().iter().map(|b| b.hermitian_part()).collect();
    let diagnostics = Diagnostics {
        min_eigenvalue: min_block_eigenvalue(&grid)?,
        marginal_residual: problem.marginal_residual(&grid),
        plateau,
        history,
        message: message.to_string(),
    };
    Ok(SolverOutcome {
        status,
        residual,
        grid,
        iterations,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::joint::JointObservable;
    use crate::povm::ProbabilityDistribution;
    use crate::sample;
    use num_complex::Complex64;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::vec;

    fn noisy_pair(lambda: f64) -> FeasibilityProblem {
        let u = ProbabilityDistribution::uniform(&sample::labels(2));
        let x = Povm::sharp_x().mix_with_trivial(lambda, &u).unwrap();
        let z = Povm::sharp_z().mix_with_trivial(lambda, &u).unwrap();
        FeasibilityProblem::from_povms(&x, &z).unwrap()
    }

    fn random_grid(rng: &mut ChaCha8Rng, d: usize, len: usize) -> Grid {
        (0..len).map(|_| sample::hermitian(rng, d)).collect()
    }

    #[test]
    fn affine_projection_satisfies_constraints_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (d, m, n) in [(2, 2, 2), (3, 3, 2), (2, 4, 3)] {
            let a = sample::povm(&mut rng, d, m, None);
            let b = sample::povm(&mut rng, d, n, None);
            let p = FeasibilityProblem::from_povms(&a, &b).unwrap();
            let g = random_grid(&mut rng, d, m * n);
            let once = project_affine_marginals(&p, &g).unwrap();
            assert!(p.marginal_residual(&once) < 1e-13);
            let twice = project_affine_marginals(&p, &once).unwrap();
            for (u, v) in once.iter().zip(&twice) {
                assert!((u - v).max_abs() < 1e-13);
            }
        }
    }

    #[test]
    fn feasible_grid_is_fixed_by_affine_projection() {
        let z = Povm::sharp_z();
        let p = FeasibilityProblem::from_povms(&z, &z).unwrap();
        let g = p.warm_start().unwrap();
        let out = project_affine_marginals(&p, &g).unwrap();
        assert!(grid_distance(&g, &out) < 1e-15);
    }

    /// Nearest table with prescribed row and column sums, from the normal
    /// equations of `t = g + u_x + v_y` solved by Gaussian elimination.
    fn scalar_table_oracle(g: &[f64], rows: &[f64], cols: &[f64]) -> std::vec::Vec<f64> {
        let (m, n) = (rows.len(), cols.len());
        // unknowns u_0..u_{m-1}, v_0..v_{n-2}; v_{n-1} = 0
        let k = m + n - 1;
        let mut eqs: std::vec::Vec<(std::vec::Vec<f64>, f64)> = vec![];
        for x in 0..m {
            let mut row = vec![0.0; k];
            row[x] = n as f64;
            for y in 0..n - 1 {
                row[m + y] = 1.0;
            }
            let s: f64 = (0..n).map(|y| g[x * n + y]).sum();
            eqs.push((row, rows[x] - s));
        }
        for y in 0..n {
            let mut row = vec![0.0; k];
            for x in 0..m {
                row[x] = 1.0;
            }
            if y < n - 1 {
                row[m + y] = m as f64;
            }
            let s: f64 = (0..m).map(|x| g[x * n + y]).sum();
            eqs.push((row, cols[y] - s));
        }
        let mut ata = vec![vec![0.0; k + 1]; k];
        for i in 0..k {
            for j in 0..k {
                ata[i][j] = eqs.iter().map(|(r, _)| r[i] * r[j]).sum();
            }
            ata[i][k] = eqs.iter().map(|(r, b)| r[i] * b).sum();
        }
        for c in 0..k {
            let piv = (c..k).max_by(|&a, &b| ata[a][c].abs().total_cmp(&ata[b][c].abs())).unwrap();
            ata.swap(c, piv);
            for r in 0..k {
                if r != c {
                    let f = ata[r][c] / ata[c][c];
                    for j in c..=k {
                        ata[r][j] -= f * ata[c][j];
                    }
                }
            }
        }
        let sol: std::vec::Vec<f64> = (0..k).map(|i| ata[i][k] / ata[i][i]).collect();
        (0..m * n)
            .map(|idx| {
                let (x, y) = (idx / n, idx % n);
                g[idx] + sol[x] + if y < n - 1 { sol[m + y] } else { 0.0 }
            })
            .collect()
    }

    #[test]
    fn affine_projection_matches_least_squares_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = sample::povm(&mut rng, 2, 2, None);
        let b = sample::povm(&mut rng, 2, 2, None);
        let p = FeasibilityProblem::from_povms(&a, &b).unwrap();
        let g = random_grid(&mut rng, 2, 4);
        let proj = project_affine_marginals(&p, &g).unwrap();
        // the constraints act entrywise, so each real coordinate is an
        // independent 2x2 table problem
        for i in 0..2 {
            for j in 0..2 {
                for part in 0..2 {
                    let pick = |c: Complex64| if part == 0 { c.re } else { c.im };
                    let table: std::vec::Vec<f64> = g.iter().map(|m| pick(m[(i, j)])).collect();
                    let rows: std::vec::Vec<f64> = a.effects().iter().map(|m| pick(m[(i, j)])).collect();
                    let cols: std::vec::Vec<f64> = b.effects().iter().map(|m| pick(m[(i, j)])).collect();
                    let oracle = scalar_table_oracle(&table, &rows, &cols);
                    for (k, o) in oracle.iter().enumerate() {
                        assert!((pick(proj[k][(i, j)]) - o).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn psd_projection_examples() {
        let m = ComplexMatrix::diag(&[1.0, -1.0]);
        let out = project_psd_cone(&[m]).unwrap();
        assert!(out[0].distance(&ComplexMatrix::diag(&[1.0, 0.0])) < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psd = sample::psd(&mut rng, 3);
        let out = project_psd_cone(core::slice::from_ref(&psd)).unwrap();
        assert!(out[0].distance(&psd) < 1e-12);
    }

    #[test]
    fn psd_projection_matches_grid_search() {
        // real symmetric family [[a, b], [b, c]], candidates [[p, q], [q, r]]
        // with p, r ≥ 0 and q² ≤ p r
        let cases = [(0.3, 0.8, -0.5), (-0.4, 0.2, 0.6), (1.0, -1.0, 0.3), (-0.2, -0.3, 0.1)];
        let step = 0.01;
        for (a, b, c) in cases {
            let h = ComplexMatrix::from_real_rows(&[[a, b], [b, c]]);
            let proj = project_psd_cone(core::slice::from_ref(&h)).unwrap();
            let d_proj = proj[0].distance(&h);
            let mut best = f64::INFINITY;
            let steps = (1.5 / step) as i32;
            for ip in 0..=steps {
                let p = ip as f64 * step;
                for ir in 0..=steps {
                    let r = ir as f64 * step;
                    for iq in -steps..=steps {
                        let q = iq as f64 * step;
                        if q * q > p * r {
                            continue;
                        }
                        let d = libm::sqrt((a - p).powi(2) + 2.0 * (b - q).powi(2) + (c - r).powi(2));
                        best = best.min(d);
                    }
                }
            }
            assert!(d_proj <= best + 1e-12, "projection beaten by grid point");
            assert!(best - d_proj < 2.0 * step, "grid optimum {best} far from {d_proj}");
        }
    }

    #[test]
    fn identical_sharp_pair_is_feasible_at_once() {
        let z = Povm::sharp_z();
        let p = FeasibilityProblem::from_povms(&z, &z).unwrap();
        let out = dykstra_solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(out.status, SolverStatus::Feasible);
        assert!(out.iterations <= 5);
    }

    #[test]
    fn sharp_z_x_is_infeasible() {
        let p = FeasibilityProblem::from_povms(&Povm::sharp_z(), &Povm::sharp_x()).unwrap();
        let out = dykstra_solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(out.status, SolverStatus::Infeasible);
        assert!(out.diagnostics.plateau);
        assert!(out.residual > 1e-2, "plateau residual {}", out.residual);
    }

    #[test]
    fn noisy_pauli_pairs_around_threshold() {
        let opts = SolverOptions::default();
        for lambda in [0.6, 0.7] {
            let out = dykstra_solve(&noisy_pair(lambda), &opts).unwrap();
            assert_eq!(out.status, SolverStatus::Feasible, "λ = {lambda}: {:?}", out.diagnostics.message);
            assert!(out.diagnostics.min_eigenvalue >= -tol::PSD);
            assert!(out.diagnostics.marginal_residual < tol::CERT);
        }
        for lambda in [0.72, 0.8] {
            let out = dykstra_solve(&noisy_pair(lambda), &opts).unwrap();
            assert_eq!(out.status, SolverStatus::Infeasible, "λ = {lambda}: {:?}", out.diagnostics.message);
        }
    }

    #[test]
    fn feasible_grid_is_a_joint_observable() {
        let p = noisy_pair(0.65);
        let out = dykstra_solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(out.status, SolverStatus::Feasible);
        let u = ProbabilityDistribution::uniform(&sample::labels(2));
        let a = Povm::sharp_x().mix_with_trivial(0.65, &u).unwrap();
        let b = Povm::sharp_z().mix_with_trivial(0.65, &u).unwrap();
        let j = JointObservable::from_parts_unchecked(2, sample::labels(2), sample::labels(2), out.grid).unwrap();
        assert!(j.validate_against(&a, &b, tol::CERT).unwrap().passed);
    }

    #[test]
    fn iterates_approach_the_solution_monotonically() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let opts = SolverOptions::default();
        let mut checked = 0;
        while checked < 5 {
            let a = sample::povm(&mut rng, 2, 2, Some(1));
            let b = sample::povm(&mut rng, 2, 3, Some(1));
            let ua = ProbabilityDistribution::uniform(a.outcomes());
            let ub = ProbabilityDistribution::uniform(b.outcomes());
            let p = FeasibilityProblem::from_povms(
                &a.mix_with_trivial(0.7, &ua).unwrap(),
                &b.mix_with_trivial(0.7, &ub).unwrap(),
            )
            .unwrap();
            let out = dykstra_solve(&p, &opts).unwrap();
            if out.status != SolverStatus::Feasible || out.iterations < 50 {
                continue;
            }
            checked += 1;
            let mut solver = Dykstra::new(&p, p.warm_start().unwrap(), opts.tol_feasible).unwrap();
            let mut last = grid_distance(solver.iterate(), &out.grid);
            while solver.iterations() < out.iterations {
                for _ in 0..10 {
                    solver.step().unwrap();
                }
                let dist = grid_distance(solver.iterate(), &out.grid);
                assert!(dist <= last + 1e-9, "distance rose from {last} to {dist}");
                last = dist;
            }
        }
    }

    #[test]
    fn verdicts_are_reproducible() {
        let p = noisy_pair(0.7);
        let opts = SolverOptions::default();
        let a = dykstra_solve(&p, &opts).unwrap();
        let b = dykstra_solve(&p, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn options_and_inputs_are_checked() {
        let opts = SolverOptions {
            band_upper: 1e-8,
            ..SolverOptions::default()
        };
        let p = noisy_pair(0.5);
        assert!(dykstra_solve(&p, &opts).is_err());
        let bad = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)];
        assert!(matches!(
            FeasibilityProblem::new(bad, Povm::sharp_z().effects().to_vec()),
            Err(Error::InconsistentMarginals { .. })
        ));
        assert!(project_affine_marginals(&p, &[]).is_err());
    }
}
