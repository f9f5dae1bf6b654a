//! Recovery of the universal series from localization integrals by exact linear
//! algebra on log-series coefficients.
//!
//! For a panel of (surface, class) rows with exponent vectors `e`, the `z^n`
//! coefficient of `log S` is `Σ_i e_i [log A_i]_n`. Each `n` is one linear system;
//! redundant rows must be satisfied exactly.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{segre_integral, verlinde_chi, EqKClass, LineTerm, SurfaceKind, ToricSurface, DEFAULT_SEED};
use crate::rational::{format_q, q, qf, serialize_q_matrix, serialize_q_vec, Q};
use crate::series::{Series, Var};
use crate::universal::{segre_A, verlinde_B, Status};

/// Why an exact solve failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveFailure {
    /// The coefficient matrix has rank below the number of unknowns.
    Singular { rank: usize },
    /// Right-hand side `column` is not in the column space.
    Inconsistent { column: usize },
}

fn lcm_of_denominators(row: &[Q]) -> BigInt {
    row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Bareiss elimination with full pivoting on `[a | rhs]`, rows scaled to integers.
/// Returns the reduced integer matrix, the column permutation and the rank.
fn bareiss(a: &[Vec<Q>], rhs: &[Vec<Q>], unknowns: usize) -> (Vec<Vec<BigInt>>, Vec<usize>, usize) {
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(rhs)
        .map(|(ra, rb)| {
            let full: Vec<Q> = ra.iter().chain(rb).cloned().collect();
            let l = Q::from_integer(lcm_of_denominators(&full));
            full.iter().map(|x| (x * &l).to_integer()).collect()
        })
        .collect();
    let rows = m.len();
    let cols = m.first().map_or(unknowns, |r| r.len());
    let mut perm: Vec<usize> = (0..unknowns).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    while rank < rows.min(unknowns) {
        let pivot = (rank..rows).flat_map(|i| (rank..unknowns).map(move |j| (i, j))).find(|&(i, j)| !m[i][j].is_zero());
        let Some((pi, pj)) = pivot else { break };
        m.swap(rank, pi);
        if pj != rank {
            for row in m.iter_mut() {
                row.swap(rank, pj);
            }
            perm.swap(rank, pj);
        }
        let k = rank;
        for i in k + 1..rows {
            for j in k + 1..cols {
                let v = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
        rank += 1;
    }
    (m, perm, rank)
}

/// Rank of a rational matrix.
pub fn matrix_rank(a: &[Vec<Q>]) -> usize {
    let unknowns = a.first().map_or(0, |r| r.len());
    let empty: Vec<Vec<Q>> = vec![Vec::new(); a.len()];
    bareiss(a, &empty, unknowns).2
}

/// Solve `a x = b_j` for every column `b_j` of `rhs` exactly. Rows beyond the rank
/// must be satisfied exactly; nothing is averaged.
pub fn solve_exact(a: &[Vec<Q>], rhs: &[Vec<Q>]) -> std::result::Result<Vec<Vec<Q>>, SolveFailure> {
    let unknowns = a.first().map_or(0, |r| r.len());
    let k = rhs.first().map_or(0, |r| r.len());
    let (m, perm, rank) = bareiss(a, rhs, unknowns);
    for row in &m[rank..] {
        if let Some(c) = (0..k).find(|&c| !row[unknowns + c].is_zero()) {
            return Err(SolveFailure::Inconsistent { column: c });
        }
    }
    if rank < unknowns {
        return Err(SolveFailure::Singular { rank });
    }
    let mut x = vec![vec![Q::zero(); k]; unknowns];
    for c in 0..k {
        let mut y = vec![Q::zero(); unknowns];
        for i in (0..unknowns).rev() {
            let mut acc = Q::from_integer(m[i][unknowns + c].clone());
            for j in i + 1..unknowns {
                acc -= Q::from_integer(m[i][j].clone()) * &y[j];
            }
            y[i] = acc / Q::from_integer(m[i][i].clone());
        }
        for (i, &p) in perm.iter().enumerate() {
            x[p][c] = y[i].clone();
        }
    }
    Ok(x)
}

/// Segre extraction columns.
pub const SEGRE_COLUMNS: [&str; 5] = ["c2", "c1^2", "chi(O)", "c1.K", "K^2"];
/// Verlinde extraction columns.
pub const VERLINDE_COLUMNS: [&str; 4] = ["chi(L)", "chi(O)", "c1.K - K^2/2", "K^2"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PanelRow {
    pub surface: SurfaceKind,
    pub class: String,
    #[serde(skip)]
    pub eq_class: EqKClass,
    #[serde(serialize_with = "serialize_q_vec")]
    pub exponents: Vec<Q>,
}

/// Rows of (surface, class) whose exponent vectors span all columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeometryPanel {
    /// Rank `s` of the classes, or the twist `r` for a Verlinde panel.
    pub rank: i64,
    pub columns: Vec<String>,
    pub rows: Vec<PanelRow>,
}

impl GeometryPanel {
    /// Segre panel from explicit rows; the exponent matrix must have rank 5.
    pub fn segre(s: i64, rows: Vec<(SurfaceKind, EqKClass)>) -> Result<GeometryPanel> {
        let rows = rows
            .into_iter()
            .map(|(kind, class)| {
                let surface = ToricSurface::new(kind)?;
                if class.rank() != s {
                    return Err(Error::Panel(format!("class {class} has rank {}, expected {s}", class.rank())));
                }
                let nm = class.numerics(&surface);
                let exponents = [nm.c2, nm.c1sq, nm.chi_o, nm.c1k, nm.ksq].iter().map(|&v| q(v)).collect();
                Ok(PanelRow { surface: kind, class: class.to_string(), eq_class: class, exponents })
            })
            .collect::<Result<Vec<_>>>()?;
        GeometryPanel::checked(s, &SEGRE_COLUMNS, rows)
    }

    /// Verlinde panel of line bundles; the exponent matrix must have rank 4.
    pub fn verlinde(r: i64, rows: Vec<(SurfaceKind, Vec<i64>)>) -> Result<GeometryPanel> {
        let rows = rows
            .into_iter()
            .map(|(kind, line)| {
                let surface = ToricSurface::new(kind)?;
                let c1k = surface.intersect(&line, &surface.canonical);
                let exponents = vec![
                    q(surface.chi_line(&line)),
                    q(surface.chi_o),
                    q(c1k) - qf(surface.ksq, 2),
                    q(surface.ksq),
                ];
                let class = EqKClass::line(line);
                Ok(PanelRow { surface: kind, class: class.to_string(), eq_class: class, exponents })
            })
            .collect::<Result<Vec<_>>>()?;
        GeometryPanel::checked(r, &VERLINDE_COLUMNS, rows)
    }

    fn checked(rank: i64, columns: &[&str], rows: Vec<PanelRow>) -> Result<GeometryPanel> {
        let panel = GeometryPanel { rank, columns: columns.iter().map(|c| c.to_string()).collect(), rows };
        let got = matrix_rank(&panel.exponent_matrix());
        if got < columns.len() {
            return Err(Error::Panel(format!(
                "exponent matrix has rank {got}, need {} (rows: {})",
                columns.len(),
                panel.rows.len()
            )));
        }
        Ok(panel)
    }

    pub fn exponent_matrix(&self) -> Vec<Vec<Q>> {
        self.rows.iter().map(|r| r.exponents.clone()).collect()
    }

    /// The same rows in reverse order.
    pub fn reversed(&self) -> GeometryPanel {
        let mut p = self.clone();
        p.rows.reverse();
        p
    }
}

/// Small line classes per surface, in the surface basis.
fn random_line(kind: SurfaceKind, rng: &mut ChaCha8Rng) -> Vec<i64> {
    match kind {
        SurfaceKind::P2 => vec![rng.gen_range(-2..=3)],
        SurfaceKind::P1xP1 => vec![rng.gen_range(-1..=2), rng.gen_range(-1..=2)],
        SurfaceKind::F1 => vec![rng.gen_range(-1..=2), rng.gen_range(-1..=1)],
    }
}

/// A rank-`s` class with `p` positive and `p - s` negative line terms.
fn random_class(kind: SurfaceKind, s: i64, rng: &mut ChaCha8Rng) -> EqKClass {
    let pos = s.max(0) + rng.gen_range(0..=1);
    let neg = pos - s;
    let mut terms = Vec::new();
    for _ in 0..pos {
        terms.push((1, random_line(kind, rng)));
    }
    for _ in 0..neg {
        terms.push((-1, random_line(kind, rng)));
    }
    EqKClass::from_terms(terms)
}

/// Seed of the deterministic class generator used by the panel builders.
pub const PANEL_SEED: u64 = 7;

fn greedy_rows<T: Clone>(
    surfaces: &[SurfaceKind],
    size: usize,
    needed: usize,
    mut draw: impl FnMut(SurfaceKind, &mut ChaCha8Rng) -> Option<(T, Vec<Q>)>,
) -> Result<Vec<(SurfaceKind, T)>> {
    if surfaces.is_empty() {
        return Err(Error::Panel("no surfaces".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PANEL_SEED);
    let mut rows: Vec<(SurfaceKind, T)> = Vec::new();
    let mut matrix: Vec<Vec<Q>> = Vec::new();
    let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
    let mut rank = 0;
    for attempt in 0..4000 {
        if rows.len() >= size && rank == needed {
            return Ok(rows);
        }
        let kind = surfaces[attempt % surfaces.len()];
        let Some((item, e)) = draw(kind, &mut rng) else { continue };
        if seen.contains(&e) {
            continue;
        }
        matrix.push(e.clone());
        let new_rank = matrix_rank(&matrix);
        // Rows that do not raise the rank are kept only once the panel spans, and
        // serve as consistency checks.
        if new_rank > rank || (rank == needed && rows.len() < size) {
            rank = new_rank;
            seen.insert(e);
            rows.push((kind, item));
        } else {
            matrix.pop();
        }
    }
    Err(Error::Panel(format!("exponent matrix reaches rank {rank} only, need {needed}")))
}

/// Segre panel of `size` rows on the given surfaces.
pub fn build_panel_on(s: i64, size: usize, surfaces: &[SurfaceKind]) -> Result<GeometryPanel> {
    if size < SEGRE_COLUMNS.len() {
        return Err(Error::Panel(format!("size {size} below the {} unknowns", SEGRE_COLUMNS.len())));
    }
    let rows = greedy_rows(surfaces, size, 5, |kind, rng| {
        let surface = ToricSurface::new(kind).ok()?;
        let class = random_class(kind, s, rng);
        let nm = class.numerics(&surface);
        let e = [nm.c2, nm.c1sq, nm.chi_o, nm.c1k, nm.ksq].iter().map(|&v| q(v)).collect();
        Some((class, e))
    })?;
    GeometryPanel::segre(s, rows)
}

/// Segre panel over P2, P1xP1 and F1.
pub fn build_panel(s: i64, size: usize) -> Result<GeometryPanel> {
    build_panel_on(s, size, &[SurfaceKind::P2, SurfaceKind::P1xP1, SurfaceKind::F1])
}

/// Verlinde panel of line bundles over P2, P1xP1 and F1.
pub fn build_verlinde_panel(r: i64, size: usize) -> Result<GeometryPanel> {
    let surfaces = [SurfaceKind::P2, SurfaceKind::P1xP1, SurfaceKind::F1];
    let rows = greedy_rows(&surfaces, size, 4, |kind, rng| {
        let surface = ToricSurface::new(kind).ok()?;
        let line = random_line(kind, rng);
        let e = vec![
            q(surface.chi_line(&line)),
            q(surface.chi_o),
            q(surface.intersect(&line, &surface.canonical)) - qf(surface.ksq, 2),
            q(surface.ksq),
        ];
        Some((line, e))
    })?;
    GeometryPanel::verlinde(r, rows)
}

/// Oracle generating functions of every row, `1 + Σ_{n=1}^{order} I_n x^n`.
fn row_series<F>(panel: &GeometryPanel, order: usize, var: Var, integral: F) -> Result<Vec<Series>>
where
    F: Fn(&ToricSurface, &EqKClass, usize) -> Result<Q> + Sync,
{
    panel
        .rows
        .par_iter()
        .map(|row| {
            let surface = ToricSurface::new(row.surface)?;
            let mut coeffs = vec![q(1)];
            for n in 1..=order {
                coeffs.push(integral(&surface, &row.eq_class, n)?);
            }
            Ok(Series::from_coeffs(var, coeffs))
        })
        .collect()
}

/// Solve for the log-series of the universal factors from the row series.
fn solve_logs(panel: &GeometryPanel, rows: &[Series]) -> Result<Vec<Series>> {
    let order = rows.first().map_or(0, |s| s.order());
    let var = rows.first().map_or(Var::Z, |s| s.var());
    let unknowns = panel.columns.len();
    if order == 0 {
        return Ok(vec![Series::one(var, 0); unknowns]);
    }
    let logs = rows.iter().map(|s| s.log()).collect::<Result<Vec<_>>>()?;
    let rhs: Vec<Vec<Q>> = logs.iter().map(|l| l.coeffs()[1..].to_vec()).collect();
    let x = solve_exact(&panel.exponent_matrix(), &rhs).map_err(|f| match f {
        SolveFailure::Singular { rank } => Error::Panel(format!("exponent matrix has rank {rank}")),
        SolveFailure::Inconsistent { column } => Error::UniversalityViolation { n: column + 1 },
    })?;
    x.into_iter()
        .map(|coeffs| {
            let mut c = vec![Q::zero()];
            c.extend(coeffs);
            Series::from_coeffs(var, c).exp()
        })
        .collect()
}

/// Extracted series together with the data they came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extraction {
    pub kind: String,
    pub rank: i64,
    pub order: usize,
    pub seed: u64,
    pub panel: GeometryPanel,
    /// Oracle values `I_1..I_order` per panel row.
    #[serde(serialize_with = "serialize_q_matrix")]
    pub integrals: Vec<Vec<Q>>,
    /// `A_0..A_4` (Segre) or `B_1..B_4` (Verlinde).
    pub series: Vec<Series>,
}

/// `A_0..A_4` at rank `s` from the Segre integrals of the panel rows.
pub fn extract_universal(s: i64, order: usize, panel: &GeometryPanel) -> Result<Extraction> {
    extract_universal_seeded(s, order, panel, DEFAULT_SEED)
}

pub fn extract_universal_seeded(s: i64, order: usize, panel: &GeometryPanel, seed: u64) -> Result<Extraction> {
    if panel.columns.len() != SEGRE_COLUMNS.len() || panel.rank != s {
        return Err(Error::Panel(format!("not a rank-{s} Segre panel")));
    }
    let rows = row_series(panel, order, Var::Z, |surface, class, n| segre_integral(surface, class, n, seed))?;
    let series = solve_logs(panel, &rows)?;
    Ok(Extraction {
        kind: "segre".into(),
        rank: s,
        order,
        seed,
        panel: panel.clone(),
        integrals: rows.iter().map(|r| r.coeffs()[1..].to_vec()).collect(),
        series,
    })
}

/// `B_1..B_4` at twist `r` from Verlinde numbers of the panel's line bundles.
pub fn extract_verlinde_on(r: i64, order: usize, panel: &GeometryPanel, seed: u64) -> Result<Extraction> {
    if panel.columns.len() != VERLINDE_COLUMNS.len() {
        return Err(Error::Panel("not a Verlinde panel".into()));
    }
    let rows = row_series(panel, order, Var::W, |surface, class, n| {
        let line = LineTerm { coeff: 1, class: class.c1(surface), shift: (0, 0) };
        verlinde_chi(surface, &line, r, n, seed).map(Q::from_integer)
    })?;
    let series = solve_logs(panel, &rows)?;
    Ok(Extraction {
        kind: "verlinde".into(),
        rank: r,
        order,
        seed,
        panel: panel.clone(),
        integrals: rows.iter().map(|r| r.coeffs()[1..].to_vec()).collect(),
        series,
    })
}

/// `B_1..B_4` at twist `r` on the default Verlinde panel.
pub fn extract_verlinde(r: i64, order: usize) -> Result<Extraction> {
    extract_verlinde_on(r, order, &build_verlinde_panel(r, 6)?, DEFAULT_SEED)
}

/// Largest `k` with the coefficients `0..=k` of both series equal.
pub fn agreement_order(a: &Series, b: &Series) -> Option<usize> {
    let n = a.order().min(b.order());
    let first_diff = (0..=n).find(|&k| a.coeff(k) != b.coeff(k));
    match first_diff {
        None => Some(n),
        Some(0) => None,
        Some(k) => Some(k - 1),
    }
}

/// One extracted series against its closed form, when there is one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesComparison {
    pub name: String,
    pub extracted: Series,
    /// `None` when no closed form is known.
    pub status: Option<Status>,
    pub closed_form: Option<Series>,
    pub agreement_order: Option<usize>,
    /// Agreement through the extraction order.
    pub matches: bool,
}

fn compare(name: String, extracted: &Series, closed: Result<(Series, Status)>) -> SeriesComparison {
    match closed {
        Ok((c, status)) => {
            let agreement = agreement_order(extracted, &c);
            SeriesComparison {
                name,
                extracted: extracted.clone(),
                status: Some(status),
                matches: agreement == Some(extracted.order()),
                closed_form: Some(c),
                agreement_order: agreement,
            }
        }
        Err(_) => SeriesComparison {
            name,
            extracted: extracted.clone(),
            status: None,
            closed_form: None,
            agreement_order: None,
            matches: false,
        },
    }
}

/// Compare every extracted series with the catalog.
pub fn compare_with_catalog(ex: &Extraction) -> Vec<SeriesComparison> {
    ex.series
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if ex.kind == "segre" {
                let closed = segre_A(ex.rank, i, ex.order).map(|e| (e.series, e.status));
                compare(format!("A{i}"), s, closed)
            } else {
                let closed = verlinde_B(ex.rank, i + 1, ex.order).map(|e| (e.series, e.status));
                compare(format!("B{}", i + 1), s, closed)
            }
        })
        .collect()
}

/// Extracted `A_0..A_4` at a rank where `A_3, A_4` are unknown or conjectural.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictionReport {
    pub rank: i64,
    pub order: usize,
    pub seed: u64,
    pub comparisons: Vec<SeriesComparison>,
    /// Coefficients of the extracted `A_3, A_4`, as exact rational strings.
    pub a3: Vec<String>,
    pub a4: Vec<String>,
}

pub fn predict_unknown(s: i64, order: usize) -> Result<PredictionReport> {
    let panel = build_panel(s, 7)?;
    let ex = extract_universal(s, order, &panel)?;
    let coeffs = |k: usize| ex.series[k].coeffs().iter().map(format_q).collect();
    Ok(PredictionReport {
        rank: s,
        order,
        seed: ex.seed,
        a3: coeffs(3),
        a4: coeffs(4),
        comparisons: compare_with_catalog(&ex),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
    }

    #[test]
    fn solves_small_systems() {
        let a = qm(&[&[2, 1], &[1, 3], &[3, 4]]);
        let b = qm(&[&[5], &[10], &[15]]);
        assert_eq!(solve_exact(&a, &b).unwrap(), qm(&[&[1], &[3]]));
        let bad = qm(&[&[5], &[10], &[16]]);
        assert_eq!(solve_exact(&a, &bad), Err(SolveFailure::Inconsistent { column: 0 }));
        let sing = qm(&[&[1, 2], &[2, 4]]);
        assert_eq!(solve_exact(&sing, &qm(&[&[1], &[2]])), Err(SolveFailure::Singular { rank: 1 }));
    }

    #[test]
    fn pivoting_handles_zero_corner() {
        let a = vec![vec![q(0), qf(1, 2)], vec![qf(2, 3), q(0)]];
        let b = vec![vec![q(1)], vec![q(2)]];
        assert_eq!(solve_exact(&a, &b).unwrap(), vec![vec![q(3)], vec![q(2)]]);
    }

    #[test]
    fn rank_of_matrices() {
        assert_eq!(matrix_rank(&qm(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 1]])), 2);
        assert_eq!(matrix_rank(&[]), 0);
    }

    #[test]
    fn panels_span() {
        for s in [-2, 0, 1, 2] {
            let p = build_panel(s, 6).unwrap();
            assert_eq!(p.rows.len(), 6);
            assert_eq!(matrix_rank(&p.exponent_matrix()), 5);
        }
        assert!(matches!(build_panel_on(1, 6, &[SurfaceKind::P2]), Err(Error::Panel(_))));
        assert!(matches!(build_panel(1, 3), Err(Error::Panel(_))));
        let p = build_verlinde_panel(2, 5).unwrap();
        assert_eq!(matrix_rank(&p.exponent_matrix()), 4);
    }

    #[test]
    fn line_bundles_alone_miss_c2() {
        let rows = vec![
            (SurfaceKind::P2, EqKClass::line(vec![1])),
            (SurfaceKind::P2, EqKClass::line(vec![2])),
            (SurfaceKind::P1xP1, EqKClass::line(vec![1, 0])),
            (SurfaceKind::P1xP1, EqKClass::line(vec![1, 2])),
            (SurfaceKind::F1, EqKClass::line(vec![1, 0])),
            (SurfaceKind::F1, EqKClass::line(vec![2, 1])),
        ];
        assert!(matches!(GeometryPanel::segre(1, rows), Err(Error::Panel(_))));
    }

    #[test]
    fn order_zero_is_trivial() {
        let p = build_panel(1, 5).unwrap();
        let ex = extract_universal(1, 0, &p).unwrap();
        assert!(ex.series.iter().all(|s| s == &Series::one(Var::Z, 0)));
    }

    #[test]
    fn rank_one_order_two() {
        let p = build_panel(1, 6).unwrap();
        let ex = extract_universal(1, 2, &p).unwrap();
        assert!(compare_with_catalog(&ex).iter().all(|c| c.matches));
    }

    #[test]
    fn agreement_orders() {
        let a = Series::from_ints(Var::Z, &[1, 2, 3], 2);
        let b = Series::from_ints(Var::Z, &[1, 2, 4], 2);
        assert_eq!(agreement_order(&a, &b), Some(1));
        assert_eq!(agreement_order(&a, &a), Some(2));
        assert_eq!(agreement_order(&a, &Series::from_ints(Var::Z, &[2], 2)), None);
    }

    #[test]
    fn negative_numbers_survive_scaling() {
        let a = vec![vec![qf(-1, 3), q(1)], vec![q(1), q(1)]];
        let b = vec![vec![q(0)], vec![qf(4, 3)]];
        let x = solve_exact(&a, &b).unwrap();
        assert_eq!(x, vec![vec![q(1)], vec![qf(1, 3)]]);
    }
}
