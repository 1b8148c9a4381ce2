//! Major-arc models.
//!
//! `L_{j,s}(α, β) = Σ_{(A/Q, B/Q) ∈ R_s} S(A/Q, B/Q) U_j(α - A/Q, β - B/Q) χ_s(α - A/Q) χ_s(β - B/Q)`,
//! `L_j = Σ_{1 <= s <= εj} L_{j,s}` and `E_j = M_j - L_j`.
//!
//! Level-`s` fractions are more than twice the `χ_s` radius apart, so at most
//! one `A/Q` (found by [`find_alpha_s`]) and one `B/Q` contribute.

use num_complex::Complex64;
use rayon::prelude::*;

use super::bump::chi_s;
use super::continuous::eval_uj;
use super::pieces::MjEvaluator;
use super::sup::BetaEvaluator;
use super::MultiplierModel;
use crate::error::{param, Result};
use crate::number_theory::{chi_s_radius, find_alpha_s, gauss_sum, gauss_sums_all_b, FractionPair, ReducedFraction};
use crate::phase::{gcd, grid_offset, offset_from_fraction, TorusPoint};

fn check_level(j: u32, s: u32, epsilon: f64) -> Result<()> {
    if s == 0 {
        return param("levels start at s = 1");
    }
    if s as f64 > epsilon * j as f64 + 1e-12 {
        return param(format!("level s = {s} exceeds εj = {}", epsilon * j as f64));
    }
    Ok(())
}

/// The `B/Q` with `|β - B/Q| < radius` and `(B, Q) = 1`, if any.
fn nearest_beta(beta: f64, q: u64, radius: f64) -> Option<(u64, f64)> {
    let b = ((beta * q as f64).round() as i64).rem_euclid(q as i64) as u64;
    let coprime = gcd(b, q) == 1 || q == 1;
    let y = offset_from_fraction(beta, b as i64, q);
    (coprime && y.abs() < radius).then_some((b, y))
}

/// `L_{j,s}(α, β)`; requires `1 <= s <= εj`.
pub fn eval_ljs(alpha: f64, beta: f64, j: u32, s: u32, model: &MultiplierModel) -> Result<Complex64> {
    check_level(j, s, model.epsilon)?;
    let zero = Complex64::new(0.0, 0.0);
    let Some(a) = find_alpha_s(alpha, s) else {
        return Ok(zero);
    };
    let radius = chi_s_radius(s);
    let Some((b, y)) = nearest_beta(beta, a.den(), radius) else {
        return Ok(zero);
    };
    let x = offset_from_fraction(alpha, a.num() as i64, a.den());
    let weight = chi_s(s, x) * chi_s(s, y);
    if weight == 0.0 {
        return Ok(zero);
    }
    let g = gauss_sum(a.num() as i64, b as i64, a.den())?;
    Ok(g * eval_uj(x, y, j, &model.quadrature)? * weight)
}

/// `L_j(α, β)`.
pub fn eval_lj(alpha: f64, beta: f64, j: u32, model: &MultiplierModel) -> Result<Complex64> {
    let top = model.arc(j)?.max_level();
    (1..=top).map(|s| eval_ljs(alpha, beta, j, s, model)).sum()
}

/// `S(A/Q, B/Q) U_j(α - A/Q, β - B/Q)`, the single-box model of `M_j`.
pub fn eval_box_model(
    alpha: f64,
    beta: f64,
    j: u32,
    center: &FractionPair,
    model: &MultiplierModel,
) -> Result<Complex64> {
    let (a, b) = (center.alpha, center.beta);
    let g = gauss_sum(a.num() as i64, b.num() as i64, a.den())?;
    let x = offset_from_fraction(alpha, a.num() as i64, a.den());
    let y = offset_from_fraction(beta, b.num() as i64, b.den());
    Ok(g * eval_uj(x, y, j, &model.quadrature)?)
}

/// `E_j^α(β) = M_j^α(β) - L_j^α(β)`.
pub fn eval_ej(alpha: &TorusPoint, beta: f64, j: u32, model: &MultiplierModel) -> Result<Complex64> {
    EjEvaluator::new(alpha, j, model)?.eval(beta)
}

/// A level of `L_j` that is active for this `α`.
#[derive(Clone, Copy, Debug)]
struct ActiveLevel {
    s: u32,
    a: ReducedFraction,
    x: f64,
    weight_x: f64,
}

/// `E_j^α` as a function of `β`, with `M_j` coefficients precomputed.
#[derive(Clone, Debug)]
pub struct EjEvaluator {
    j: u32,
    mj: MjEvaluator,
    model: MultiplierModel,
    active: Vec<ActiveLevel>,
}

impl EjEvaluator {
    pub fn new(alpha: &TorusPoint, j: u32, model: &MultiplierModel) -> Result<Self> {
        let mj = MjEvaluator::new(alpha, j)?;
        let top = model.arc(j)?.max_level();
        let av = alpha.value();
        let active = (1..=top)
            .filter_map(|s| {
                let a = find_alpha_s(av, s)?;
                let x = offset_from_fraction(av, a.num() as i64, a.den());
                let weight_x = chi_s(s, x);
                (weight_x != 0.0).then_some(ActiveLevel { s, a, x, weight_x })
            })
            .collect();
        Ok(Self {
            j,
            mj,
            model: model.clone(),
            active,
        })
    }

    pub fn mj(&self) -> &MjEvaluator {
        &self.mj
    }

    /// True when `L_j^α` vanishes identically.
    pub fn is_minor(&self) -> bool {
        self.active.is_empty()
    }

    pub fn lj(&self, beta: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for lv in &self.active {
            let q = lv.a.den();
            if let Some((b, y)) = nearest_beta(beta, q, chi_s_radius(lv.s)) {
                let wy = chi_s(lv.s, y);
                if wy != 0.0 {
                    let g = gauss_sum(lv.a.num() as i64, b as i64, q)?;
                    acc += g * eval_uj(lv.x, y, self.j, &self.model.quadrature)? * (lv.weight_x * wy);
                }
            }
        }
        Ok(acc)
    }

    /// `L_j(k/L)` for `k = 0..L`; only the `χ_s` windows are evaluated.
    pub fn lj_grid(&self, l: usize) -> Result<Vec<Complex64>> {
        let mut out = vec![Complex64::new(0.0, 0.0); l];
        for lv in &self.active {
            let q = lv.a.den();
            let sums = gauss_sums_all_b(lv.a.num() as i64, q)?;
            let radius = chi_s_radius(lv.s);
            let mut tasks = Vec::new();
            for b in (0..q).filter(|&b| gcd(b, q) == 1 || q == 1) {
                let c = b as f64 / q as f64;
                let k0 = ((c - radius) * l as f64).floor() as i64;
                let k1 = ((c + radius) * l as f64).ceil() as i64;
                for k in k0..=k1 {
                    let y = grid_offset(k, l, b as i64, q);
                    let wy = chi_s(lv.s, y);
                    if wy != 0.0 {
                        tasks.push((k.rem_euclid(l as i64) as usize, b, y, wy));
                    }
                }
            }
            let vals: Vec<Complex64> = tasks
                .par_iter()
                .map(|&(_, b, y, wy)| {
                    Ok(sums[b as usize] * eval_uj(lv.x, y, self.j, &self.model.quadrature)? * (lv.weight_x * wy))
                })
                .collect::<Result<_>>()?;
            for (t, v) in tasks.iter().zip(vals) {
                out[t.0] += v;
            }
        }
        Ok(out)
    }
}

impl BetaEvaluator for EjEvaluator {
    fn eval(&self, beta: f64) -> Result<Complex64> {
        Ok(self.mj.eval(beta) - self.lj(beta)?)
    }

    fn grid(&self, l: usize) -> Result<Vec<Complex64>> {
        let m = self.mj.grid(l)?;
        let lj = self.lj_grid(l)?;
        Ok(m.values().iter().zip(lj).map(|(a, b)| a - b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::{eval_mj, eval_uj};
    use crate::number_theory::enumerate_level;

    fn model(eps: f64) -> MultiplierModel {
        MultiplierModel::with_epsilon(eps).unwrap()
    }

    /// Oracle: the defining sum over every pair of the level.
    fn ljs_by_level(alpha: f64, beta: f64, j: u32, s: u32, m: &MultiplierModel) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in enumerate_level(s).unwrap().pairs() {
            let x = offset_from_fraction(alpha, a.num() as i64, a.den());
            let y = offset_from_fraction(beta, b.num() as i64, b.den());
            let w = chi_s(s, x) * chi_s(s, y);
            if w != 0.0 {
                let g = gauss_sum(a.num() as i64, b.num() as i64, a.den()).unwrap();
                acc += g * eval_uj(x, y, j, &m.quadrature).unwrap() * w;
            }
        }
        acc
    }

    #[test]
    fn single_term_matches_level_sum() {
        let m = model(0.2);
        let cases = [
            (1.0 / 3.0 + 1e-4, 1.0 / 3.0 - 3e-4, 10, 2),
            (2.0 / 3.0, 1.0 / 3.0 + 1e-3, 10, 2),
            (0.5 + 2e-3, 0.5 - 1e-2, 10, 1),
            (0.001, 0.004, 6, 1),
            (0.25 + 1e-4, 0.75, 12, 2),
            (0.4, 0.2, 10, 2),
        ];
        for &(a, b, j, s) in &cases {
            let got = eval_ljs(a, b, j, s, &m).unwrap();
            let want = ljs_by_level(a, b, j, s, &m);
            assert!((got - want).norm() < 1e-12, "{a} {b} {j} {s}: {got} vs {want}");
        }
    }

    #[test]
    fn far_from_level_fractions_is_zero() {
        let m = model(0.2);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert_eq!(eval_ljs(golden, 0.3, 10, 2, &m).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn half_half_vanishes() {
        let m = model(0.2);
        let v = eval_ljs(0.5, 0.5, 10, 1, &m).unwrap();
        assert!(v.norm() < 1e-9);
    }

    #[test]
    fn beta_outside_window() {
        let m = model(0.2);
        let v = eval_ljs(1.0 / 3.0, 1.0 / 3.0 + 1e-2, 10, 2, &m).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn level_above_eps_j_is_rejected() {
        assert!(eval_ljs(0.5, 0.5, 4, 1, &model(0.2)).is_err());
    }

    #[test]
    fn no_levels_means_ej_is_mj() {
        let a = TorusPoint::rational(1, 3).unwrap();
        let m = model(0.05);
        for b in [0.0, 0.1, 1.0 / 3.0] {
            assert_eq!(eval_ej(&a, b, 12, &m).unwrap(), eval_mj(&a, b, 12).unwrap());
        }
    }

    #[test]
    fn grid_matches_pointwise() {
        let a = TorusPoint::rational(1, 2).unwrap();
        let m = model(0.15);
        let ev = EjEvaluator::new(&a, 8, &m).unwrap();
        assert!(!ev.is_minor());
        let l = 1 << 11;
        let g = ev.grid(l).unwrap();
        for k in [0, 3, l / 2 - 2, l / 2, l / 2 + 5, l - 1] {
            let p = BetaEvaluator::eval(&ev, k as f64 / l as f64).unwrap();
            assert!((g[k] - p).norm() < 1e-11, "k = {k}");
        }
    }

    #[test]
    fn approximation_is_good_near_center() {
        // |M_j - S U_j| is far below |M_j| in the box around (1/3, 1/3)
        let m = model(0.2);
        let c = FractionPair {
            alpha: ReducedFraction::new(1, 3).unwrap(),
            beta: ReducedFraction::new(1, 3).unwrap(),
        };
        let a = 1.0 / 3.0 + 2e-7;
        let b = 1.0 / 3.0 + 1e-3;
        let mj = eval_mj(&TorusPoint::real(a).unwrap(), b, 10).unwrap();
        let model_val = eval_box_model(a, b, 10, &c, &m).unwrap();
        assert!(mj.norm() > 1e-2);
        assert!((mj - model_val).norm() < 1e-3 * mj.norm());
    }
}
