//! Output-weight evaluation strategies.
//!
//! Three ways to weight an accepted node: a closed-form projection that only
//! touches the newest node, a moving-window least squares that re-solves the
//! most recent K weights against a deflated target, and a global least
//! squares over everything. Wider solves cost more per step and fit no worse
//! at equal node count.

use crate::error::{Result, ScnError};
use crate::linalg::{col_inner, lstsq_min_norm, Matrix, SolveTolerance};

/// Constructive weight row for one new node: per output q,
/// beta_q = (e_q . h) / (h . h), the exact 1-D least-squares step from the
/// current residual along h.
pub fn eval_constructive(e: &Matrix, h: &[f64]) -> Result<Vec<f64>> {
    if h.len() != e.rows() {
        return Err(ScnError::DimensionMismatch(format!(
            "activation column has {} entries but the residual has {} rows",
            h.len(),
            e.rows()
        )));
    }
    let h_sq = col_inner(h, h)?;
    if h_sq <= 0.0 {
        return Err(ScnError::InvalidConfig(
            "cannot weight a zero activation column".into(),
        ));
    }
    (0..e.cols())
        .map(|q| Ok(col_inner(&e.col(q), h)? / h_sq))
        .collect()
}

/// Global re-solve: minimum-norm least squares of `H B = T` over all rows.
pub fn eval_global(h: &Matrix, t: &Matrix, tol: SolveTolerance) -> Result<Matrix> {
    lstsq_min_norm(h, t, tol)
}

/// Moving-window re-solve with window width `k`.
///
/// With L <= k columns this is exactly [`eval_global`] and `beta_prev` must
/// be absent. Beyond that, the first L - k weight rows are frozen to
/// `beta_prev` (copied into the result verbatim) and only the last k rows
/// are re-solved against the deflated target `T - H_old * beta_prev`.
pub fn eval_window(
    h: &Matrix,
    t: &Matrix,
    beta_prev: Option<&Matrix>,
    k: usize,
    tol: SolveTolerance,
) -> Result<Matrix> {
    if k == 0 {
        return Err(ScnError::InvalidConfig("window width must be >= 1".into()));
    }
    let l = h.cols();
    if l <= k {
        if beta_prev.is_some() {
            return Err(ScnError::DimensionMismatch(
                "no frozen prefix exists while the window still covers every node".into(),
            ));
        }
        return eval_global(h, t, tol);
    }
    let prefix_rows = l - k;
    let prefix = beta_prev.ok_or_else(|| {
        ScnError::DimensionMismatch(format!(
            "window solve over {l} nodes needs the {prefix_rows} frozen weight rows"
        ))
    })?;
    if prefix.rows() != prefix_rows || prefix.cols() != t.cols() {
        return Err(ScnError::DimensionMismatch(format!(
            "frozen prefix is {}x{} but {prefix_rows}x{} is required",
            prefix.rows(),
            prefix.cols(),
            t.cols()
        )));
    }
    let h_old = h.slice_cols(0, prefix_rows)?;
    let h_win = h.slice_cols(prefix_rows, l)?;
    let deflated = t.sub(&h_old.matmul(prefix)?)?;
    let beta_win = lstsq_min_norm(&h_win, &deflated, tol)?;
    Matrix::vstack(prefix, &beta_win)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frob_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn tol_for(m: &Matrix) -> SolveTolerance {
        SolveTolerance::default_for(m.rows(), m.cols())
    }

    /// Golden-section minimizer of f over [lo, hi]; independent oracle for
    /// the closed-form projection.
    fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        let mut c = hi - phi * (hi - lo);
        let mut d = lo + phi * (hi - lo);
        for _ in 0..200 {
            if f(c) < f(d) {
                hi = d;
            } else {
                lo = c;
            }
            c = hi - phi * (hi - lo);
            d = lo + phi * (hi - lo);
        }
        (lo + hi) / 2.0
    }

    #[test]
    fn constructive_hand_values() {
        let e = Matrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        assert!(close(eval_constructive(&e, &[1.0, 1.0]).unwrap()[0], 1.0, 1e-15));
        assert!(close(eval_constructive(&e, &[1.0, -1.0]).unwrap()[0], 0.0, 1e-15));
        let e = Matrix::from_vec(2, 1, vec![1.0, 3.0]).unwrap();
        assert!(close(eval_constructive(&e, &[1.0, 1.0]).unwrap()[0], 2.0, 1e-15));
        assert!(eval_constructive(&e, &[0.0, 0.0]).is_err());
        assert!(eval_constructive(&e, &[1.0]).is_err());
    }

    #[test]
    fn constructive_matches_golden_section_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let n = 6;
            let ev: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let hv: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
            let e = Matrix::from_vec(n, 1, ev.clone()).unwrap();
            let beta = eval_constructive(&e, &hv).unwrap()[0];
            let objective = |b: f64| -> f64 {
                ev.iter()
                    .zip(&hv)
                    .map(|(e, h)| (e - b * h) * (e - b * h))
                    .sum()
            };
            let oracle = golden_min(objective, -10.0, 10.0);
            assert!(close(beta, oracle, 1e-6), "beta {beta} vs oracle {oracle}");
        }
    }

    #[test]
    fn global_identity_and_single_column() {
        let h = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let t = Matrix::from_vec(2, 1, vec![0.3, 0.7]).unwrap();
        let b = eval_global(&h, &t, tol_for(&h)).unwrap();
        assert!(close(b.get(0, 0), 0.3, 1e-13));
        assert!(close(b.get(1, 0), 0.7, 1e-13));

        // With a single column the global solve and the constructive
        // projection are the same formula.
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let hv: Vec<f64> = (0..7).map(|_| rng.random::<f64>() + 0.1).collect();
        let tv: Vec<f64> = (0..7).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let h = Matrix::from_vec(7, 1, hv.clone()).unwrap();
        let t = Matrix::from_vec(7, 1, tv).unwrap();
        let global = eval_global(&h, &t, tol_for(&h)).unwrap().get(0, 0);
        let constructive = eval_constructive(&t, &hv).unwrap()[0];
        assert!(close(global, constructive, 1e-12));
    }

    #[test]
    fn global_handles_duplicated_columns() {
        // Two identical columns: minimum-norm splits the weight evenly.
        let h = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let t = Matrix::from_vec(2, 1, vec![2.0, 2.0]).unwrap();
        let b = eval_global(&h, &t, tol_for(&h)).unwrap();
        assert!(close(b.get(0, 0), 1.0, 1e-12));
        assert!(close(b.get(1, 0), 1.0, 1e-12));
    }

    #[test]
    fn window_covering_everything_is_global_bit_for_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let (n, l) = (10, 4);
        let mut hv = vec![0.0; n * l];
        hv.iter_mut().for_each(|v| *v = rng.random::<f64>());
        let h = Matrix::from_vec(n, l, hv).unwrap();
        let tv: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let t = Matrix::from_vec(n, 1, tv).unwrap();
        let global = eval_global(&h, &t, tol_for(&h)).unwrap();
        for k in [l, l + 1, 100] {
            let window = eval_window(&h, &t, None, k, tol_for(&h)).unwrap();
            assert_eq!(window, global);
        }
    }

    #[test]
    fn window_hand_case_and_frozen_prefix() {
        // H = I2, K = 1: the first weight is frozen at 1, the window solves
        // the second column against the deflated target (0, 1).
        let h = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let t = Matrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        let prefix = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let b = eval_window(&h, &t, Some(&prefix), 1, tol_for(&h)).unwrap();
        assert!(close(b.get(0, 0), 1.0, 1e-15));
        assert!(close(b.get(1, 0), 1.0, 1e-13));

        // Frozen rows come back verbatim even on a random instance.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (n, l, k) = (12, 5, 2);
        let mut hv = vec![0.0; n * l];
        hv.iter_mut().for_each(|v| *v = rng.random::<f64>());
        let h = Matrix::from_vec(n, l, hv).unwrap();
        let tv: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let t = Matrix::from_vec(n, 1, tv).unwrap();
        let pv: Vec<f64> = (0..l - k).map(|_| rng.random::<f64>() - 0.5).collect();
        let prefix = Matrix::from_vec(l - k, 1, pv).unwrap();
        let b = eval_window(&h, &t, Some(&prefix), k, tol_for(&h)).unwrap();
        assert_eq!(b.slice_rows(0, l - k).unwrap(), prefix);
    }

    #[test]
    fn window_beats_any_same_prefix_completion() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (n, l, k) = (15, 6, 3);
        let mut hv = vec![0.0; n * l];
        hv.iter_mut().for_each(|v| *v = rng.random::<f64>());
        let h = Matrix::from_vec(n, l, hv).unwrap();
        let tv: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let t = Matrix::from_vec(n, 1, tv).unwrap();
        let pv: Vec<f64> = (0..l - k).map(|_| rng.random::<f64>() - 0.5).collect();
        let prefix = Matrix::from_vec(l - k, 1, pv).unwrap();
        let b = eval_window(&h, &t, Some(&prefix), k, tol_for(&h)).unwrap();
        let best = frob_norm(&t.sub(&h.matmul(&b).unwrap()).unwrap());
        for _ in 0..10 {
            let wv: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let other = Matrix::vstack(&prefix, &Matrix::from_vec(k, 1, wv).unwrap()).unwrap();
            let r = frob_norm(&t.sub(&h.matmul(&other).unwrap()).unwrap());
            assert!(best <= r + 1e-10);
        }
        // The all-zero completion is one such candidate.
        let zero = Matrix::vstack(&prefix, &Matrix::zeros(k, 1)).unwrap();
        let r = frob_norm(&t.sub(&h.matmul(&zero).unwrap()).unwrap());
        assert!(best <= r + 1e-10);
    }

    #[test]
    fn window_validates_prefix_shapes() {
        let h = Matrix::zeros(4, 3);
        let t = Matrix::zeros(4, 1);
        let tol = tol_for(&h);
        assert!(eval_window(&h, &t, None, 0, tol).is_err());
        // Prefix missing when required.
        assert!(eval_window(&h, &t, None, 2, tol).is_err());
        // Prefix given although the window covers everything.
        let p = Matrix::zeros(1, 1);
        assert!(eval_window(&h, &t, Some(&p), 3, tol).is_err());
        // Wrong prefix height.
        let p = Matrix::zeros(2, 1);
        assert!(eval_window(&h, &t, Some(&p), 2, tol).is_err());
    }
}
