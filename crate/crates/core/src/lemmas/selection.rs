use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nestlab::{spectral_norm, BlockOperator, LinkOperator, ModelSpace};

/// What step `i` of a sub-sum selection recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCertificate {
    pub step: usize,
    pub k: usize,
    pub alpha: f64,
    /// Singular values of the compressed term at or above this level span `P_i`, `Q_i`.
    pub threshold: f64,
    /// `‖A_k − P^⊥ A_k Q^⊥‖` against the complements of the earlier steps.
    pub leak: f64,
    /// `‖A_k − P_i A_k Q_i‖`, at most `alpha`.
    pub residual: f64,
    pub rank: usize,
}

/// A subsequence `k` with mutually orthogonal ranges `P_i` and domains `Q_i`,
/// each stored as an orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub k: Vec<usize>,
    pub p: Vec<Vec<Vec<Complex64>>>,
    pub q: Vec<Vec<Vec<Complex64>>>,
    pub certificates: Vec<StepCertificate>,
    /// `‖Σ_i A_{k(i)}‖`.
    pub partial_sum_norm: f64,
    /// `max_i ‖A_{k(i)}‖ + Σ_i α_i`.
    pub partial_sum_bound: f64,
}

pub(crate) fn projection(basis: &[DVector<Complex64>], n: usize) -> DMatrix<Complex64> {
    let mut p = DMatrix::zeros(n, n);
    for v in basis {
        p += v * v.adjoint();
    }
    p
}

fn to_dvector(v: &[Complex64]) -> DVector<Complex64> {
    DVector::from_column_slice(v)
}

/// Left and right singular vectors of `a` whose singular value is at least
/// `threshold`.
fn singular_split(a: &DMatrix<Complex64>, threshold: f64) -> (Vec<DVector<Complex64>>, Vec<DVector<Complex64>>) {
    if a.iter().all(|z| z.norm() == 0.0) {
        return (Vec::new(), Vec::new());
    }
    let svd = a.clone().try_svd(true, true, 1e-12, 0).expect("SVD converges without an iteration cap");
    let (u, v_t) = (svd.u.expect("left vectors requested"), svd.v_t.expect("right vectors requested"));
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (r, &sigma) in svd.singular_values.iter().enumerate() {
        if sigma >= threshold && sigma > 0.0 {
            left.push(u.column(r).into_owned());
            right.push(v_t.row(r).adjoint());
        }
    }
    (left, right)
}

fn same_space(ops: &[&BlockOperator]) -> Result<()> {
    if let Some(first) = ops.first() {
        if let Some(bad) = ops.iter().position(|x| x.space() != first.space()) {
            return Err(Error::Shape(format!("operator {bad} lives on a different model space")));
        }
    }
    Ok(())
}

fn check_subsets(subsets: Option<&[Vec<usize>]>, steps: usize) -> Result<()> {
    match subsets {
        Some(s) if s.len() < steps => {
            Err(Error::Shape(format!("{} index subsets supplied for {steps} steps", s.len())))
        }
        _ => Ok(()),
    }
}

/// Picks `k(0) < k(1) < …`, one step per entry of `alpha`, so that each
/// `A_{k(i)}` is within `α_i` of its compression `P_i A_{k(i)} Q_i`. Each
/// `P_i`, `Q_i` comes from thresholding the singular values of `A_k`
/// compressed to the complement of the earlier steps, at `α_i/2` for the
/// first step and `α_i/4` afterwards. With `subsets`, `k(i) ∈ subsets[i]`.
pub fn sub_sum_select(ops: &[BlockOperator], alpha: &[f64], subsets: Option<&[Vec<usize>]>) -> Result<Selection> {
    same_space(&ops.iter().collect::<Vec<_>>())?;
    if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Error::Domain(format!("alpha entries must be positive and finite (got {a})")));
    }
    check_subsets(subsets, alpha.len())?;
    let n = ops.first().map_or(0, |x| x.space().dim());
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut p_used: Vec<DVector<Complex64>> = Vec::new();
    let mut q_used: Vec<DVector<Complex64>> = Vec::new();
    let mut sel = Selection {
        k: Vec::new(),
        p: Vec::new(),
        q: Vec::new(),
        certificates: Vec::new(),
        partial_sum_norm: 0.0,
        partial_sum_bound: 0.0,
    };
    let mut next = 0;
    for (step, &alpha_i) in alpha.iter().enumerate() {
        let threshold = if step == 0 { alpha_i / 2.0 } else { alpha_i / 4.0 };
        let p_perp = &id - projection(&p_used, n);
        let q_perp = &id - projection(&q_used, n);
        let mut best: Option<(usize, f64)> = None;
        let mut chosen = None;
        for k in next..ops.len() {
            if subsets.is_some_and(|s| !s[step].contains(&k)) {
                continue;
            }
            let a_k = ops[k].matrix();
            let compressed = &p_perp * a_k * &q_perp;
            let leak = spectral_norm(&(a_k - &compressed));
            let (left, right) = singular_split(&compressed, threshold);
            let p_i = projection(&left, n);
            let q_i = projection(&right, n);
            let residual = spectral_norm(&(a_k - &p_i * a_k * &q_i));
            if residual <= alpha_i {
                chosen = Some((k, leak, residual, left, right));
                break;
            }
            if best.is_none_or(|(_, r)| residual < r) {
                best = Some((k, residual));
            }
        }
        let Some((k, leak, residual, left, right)) = chosen else {
            let detail = match best {
                Some((k, r)) => format!("closest candidate {k} has ‖A_k − P A_k Q‖ = {r:.6e} > {alpha_i:.6e}"),
                None => "no candidate index remains".into(),
            };
            return Err(Error::InsufficientData(format!("sub-sum step {step}: {detail}")));
        };
        sel.certificates.push(StepCertificate { step, k, alpha: alpha_i, threshold, leak, residual, rank: left.len() });
        sel.k.push(k);
        sel.p.push(left.iter().map(|v| v.iter().copied().collect()).collect());
        sel.q.push(right.iter().map(|v| v.iter().copied().collect()).collect());
        p_used.extend(left);
        q_used.extend(right);
        next = k + 1;
    }
    let (norm, bound) = partial_sum(ops, alpha, &sel.k);
    sel.partial_sum_norm = norm;
    sel.partial_sum_bound = bound;
    Ok(sel)
}

fn partial_sum(ops: &[BlockOperator], alpha: &[f64], k: &[usize]) -> (f64, f64) {
    let Some(first) = k.first() else { return (0.0, 0.0) };
    let mut total = ops[*first].matrix().clone();
    for &i in &k[1..] {
        total += ops[i].matrix();
    }
    let max = k.iter().map(|&i| ops[i].norm()).fold(0.0, f64::max);
    (spectral_norm(&total), max + alpha[..k.len()].iter().sum::<f64>())
}

/// Recomputes every quantity recorded in `sel` and returns the largest
/// disagreement. Fails if the recorded bases are not jointly orthonormal,
/// the indices are not increasing or a recorded residual exceeds its `α`.
pub fn verify_selection(ops: &[BlockOperator], alpha: &[f64], sel: &Selection) -> Result<f64> {
    if sel.k.windows(2).any(|w| w[0] >= w[1]) || sel.k.last().is_some_and(|&k| k >= ops.len()) {
        return Err(Error::InvalidInput("selected indices are not increasing or out of range".into()));
    }
    if sel.k.len() > alpha.len() || sel.p.len() != sel.k.len() || sel.q.len() != sel.k.len() {
        return Err(Error::Shape("selection lengths disagree".into()));
    }
    let n = ops.first().map_or(0, |x| x.space().dim());
    for side in [&sel.p, &sel.q] {
        let all: Vec<DVector<Complex64>> = side.iter().flatten().map(|v| to_dvector(v)).collect();
        for (a, u) in all.iter().enumerate() {
            for (b, v) in all.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                if (u.dotc(v) - Complex64::new(want, 0.0)).norm() > 1e-9 {
                    return Err(Error::InvalidInput("projection bases are not jointly orthonormal".into()));
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for (i, cert) in sel.certificates.iter().enumerate() {
        let a_k = ops[sel.k[i]].matrix();
        let basis = |vs: &Vec<Vec<Complex64>>| vs.iter().map(|v| to_dvector(v)).collect::<Vec<_>>();
        let p_i = projection(&basis(&sel.p[i]), n);
        let q_i = projection(&basis(&sel.q[i]), n);
        let residual = spectral_norm(&(a_k - &p_i * a_k * &q_i));
        if residual > alpha[i] + 1e-9 {
            return Err(Error::InvalidInput(format!("step {i}: residual {residual:.6e} exceeds α = {}", alpha[i])));
        }
        worst = worst.max((residual - cert.residual).abs());
    }
    let (norm, bound) = partial_sum(ops, alpha, &sel.k);
    worst = worst.max((norm - sel.partial_sum_norm).abs()).max((bound - sel.partial_sum_bound).abs());
    Ok(worst)
}

/// Step record of a linking selection. `near` is
/// `K̄ Σ_{j<n} ‖A_k D_{k(j)}‖` against `εa/2`; `far` is
/// `max_{j<n} ‖D_k B_{k(j)} ξ_{k(j)}‖` against `εa/(2^{n+2} K̄)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkingCertificate {
    pub step: usize,
    pub k: usize,
    pub subset: usize,
    /// `‖A_k D_k B_k ξ_k‖`.
    pub lead: f64,
    pub near: f64,
    pub near_bound: f64,
    pub far: f64,
    pub far_bound: f64,
    /// `‖A_k D_sum B_k‖`, evaluated after the sum is formed.
    pub direct: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkingSelection {
    pub k: Vec<usize>,
    pub a: f64,
    pub eps: f64,
    /// Common norm bound `K̄` of all the operators.
    pub k_bar: f64,
    pub certificates: Vec<LinkingCertificate>,
    #[serde(skip)]
    pub d_sum: BlockOperator,
}

/// Picks `target` indices `k(0) < k(1) < …` with `k(n)` in
/// `subsets[n mod subsets.len()]` so that `D_sum = Σ_n D_{k(n)}` keeps
/// `‖A_{k(n)} D_sum B_{k(n)}‖ > (1−ε)a` for every `n`.
pub fn linking_select(
    a_ops: &[BlockOperator],
    b_ops: &[BlockOperator],
    d_ops: &[BlockOperator],
    a: f64,
    eps: f64,
    subsets: &[Vec<usize>],
    target: usize,
) -> Result<LinkingSelection> {
    let len = a_ops.len();
    if len == 0 {
        return Err(Error::Domain("linking selection needs at least one operator triple".into()));
    }
    if b_ops.len() != len || d_ops.len() != len {
        return Err(Error::Shape(format!("sequence lengths {} / {} / {} differ", len, b_ops.len(), d_ops.len())));
    }
    same_space(&a_ops.iter().chain(b_ops).chain(d_ops).collect::<Vec<_>>())?;
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Domain(format!("a must be positive (got {a})")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("ε must lie in (0, 1) (got {eps})")));
    }
    if subsets.is_empty() {
        return Err(Error::Domain("at least one index subset is required".into()));
    }
    let mut xi = Vec::with_capacity(len);
    for i in 0..len {
        let prod = a_ops[i].matrix() * d_ops[i].matrix() * b_ops[i].matrix();
        let norm = spectral_norm(&prod);
        if norm <= a {
            return Err(Error::InvalidInput(format!("index {i}: ‖A_i D_i B_i‖ = {norm:.6e} is not above a = {a}")));
        }
        let (_, right) = singular_split(&prod, norm * (1.0 - 1e-12));
        xi.push(right.into_iter().next().expect("a nonzero matrix has a top singular vector"));
    }
    let k_bar = a_ops.iter().chain(b_ops).chain(d_ops).map(BlockOperator::norm).fold(0.0, f64::max);
    let near_bound = eps * a / 2.0;

    let mut chosen: Vec<usize> = Vec::new();
    let mut certs = Vec::new();
    let mut next = 0;
    for step in 0..target {
        let subset = step % subsets.len();
        let far_bound = eps * a / (2f64.powi(step as i32 + 2) * k_bar);
        let mut first_miss: Option<String> = None;
        let mut found = None;
        for k in next..len {
            if !subsets[subset].contains(&k) {
                continue;
            }
            let near = k_bar
                * chosen.iter().map(|&j| spectral_norm(&(a_ops[k].matrix() * d_ops[j].matrix()))).sum::<f64>();
            let far = chosen
                .iter()
                .map(|&j| (d_ops[k].matrix() * (b_ops[j].matrix() * &xi[j])).norm())
                .fold(0.0, f64::max);
            if near < near_bound && far < far_bound {
                found = Some((k, near, far));
                break;
            }
            first_miss.get_or_insert_with(|| {
                if near >= near_bound {
                    format!("candidate {k}: K̄ Σ ‖A_k D_k(j)‖ = {near:.6e} ≥ εa/2 = {near_bound:.6e}")
                } else {
                    format!("candidate {k}: max ‖D_k B_k(j) ξ_k(j)‖ = {far:.6e} ≥ {far_bound:.6e}")
                }
            });
        }
        let Some((k, near, far)) = found else {
            let why = first_miss.unwrap_or_else(|| format!("no index after {next} in subset {subset}"));
            return Err(Error::InsufficientData(format!("linking step {step}: {why}")));
        };
        let lead = (a_ops[k].matrix() * d_ops[k].matrix() * b_ops[k].matrix() * &xi[k]).norm();
        certs.push(LinkingCertificate { step, k, subset, lead, near, near_bound, far, far_bound, direct: 0.0 });
        chosen.push(k);
        next = k + 1;
    }

    let d_sum = sum_operators(d_ops[0].space(), chosen.iter().map(|&k| &d_ops[k]))?;
    let floor = (1.0 - eps) * a;
    for cert in &mut certs {
        let k = cert.k;
        cert.direct = spectral_norm(&(a_ops[k].matrix() * d_sum.matrix() * b_ops[k].matrix()));
        if cert.direct <= floor {
            return Err(Error::InsufficientData(format!(
                "linking step {}: ‖A_k D_sum B_k‖ = {:.6e} ≤ (1−ε)a = {floor:.6e}",
                cert.step, cert.direct
            )));
        }
    }
    Ok(LinkingSelection { k: chosen, a, eps, k_bar, certificates: certs, d_sum })
}

/// Sum of operators, exact when every term carries a link list.
fn sum_operators<'a>(
    space: &ModelSpace,
    terms: impl Iterator<Item = &'a BlockOperator> + Clone,
) -> Result<BlockOperator> {
    if terms.clone().all(|d| d.links().is_some()) {
        let mut acc = LinkOperator::zero(space);
        for d in terms {
            acc = acc.sum(d.links().expect("checked above"))?;
        }
        return Ok(acc.to_operator());
    }
    Ok(terms.fold(BlockOperator::zeros(space), |acc, d| &acc + d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nestlab::Link;

    fn unit_link(sp: &ModelSpace, from: usize, to: usize) -> BlockOperator {
        LinkOperator::new(sp, vec![Link::unit(sp.site(from), sp.site(to))]).unwrap().to_operator()
    }

    #[test]
    fn orthogonal_rank_ones_select_everything() {
        let sp = ModelSpace::new(4, 2, 1).unwrap();
        let ops: Vec<_> = (0..4).map(|i| unit_link(&sp, i, i + 4)).collect();
        let alpha = vec![0.5; 4];
        let sel = sub_sum_select(&ops, &alpha, None).unwrap();
        assert_eq!(sel.k, vec![0, 1, 2, 3]);
        assert!((sel.partial_sum_norm - 1.0).abs() < 1e-12);
        assert!(verify_selection(&ops, &alpha, &sel).unwrap() < 1e-9);
    }

    #[test]
    fn subset_constraints_hold() {
        let sp = ModelSpace::new(4, 2, 1).unwrap();
        let ops: Vec<_> = (0..8).map(|i| unit_link(&sp, i, i)).collect();
        let alpha: Vec<f64> = (0..3).map(|i| 0.5f64.powi(i)).collect();
        let evens: Vec<usize> = (0..8).step_by(2).collect();
        let sel = sub_sum_select(&ops, &alpha, Some(&vec![evens; 3])).unwrap();
        assert!(sel.k.iter().all(|k| k % 2 == 0));
    }

    #[test]
    fn exhausted_horizon_names_step() {
        let sp = ModelSpace::new(2, 1, 1).unwrap();
        let ops = vec![unit_link(&sp, 0, 0)];
        let err = sub_sum_select(&ops, &[1.0, 1.0], None).unwrap_err();
        assert!(matches!(&err, Error::InsufficientData(m) if m.contains("step 1")), "{err}");
    }

    #[test]
    fn linking_precondition_names_index() {
        let sp = ModelSpace::new(4, 1, 1).unwrap();
        let id = BlockOperator::identity(&sp);
        let mut d: Vec<_> = (0..4).map(|i| unit_link(&sp, i, i)).collect();
        d[3] = BlockOperator::zeros(&sp);
        let err = linking_select(&vec![id.clone(); 4], &vec![id; 4], &d, 0.5, 0.5, &[vec![0, 1, 2, 3]], 2)
            .unwrap_err();
        assert!(matches!(&err, Error::InvalidInput(m) if m.contains("index 3")), "{err}");
    }

    #[test]
    fn orthogonal_links_select_all() {
        let sp = ModelSpace::new(4, 1, 1).unwrap();
        let coord: Vec<_> = (0..4).map(|i| unit_link(&sp, i, i)).collect();
        let d: Vec<_> = (0..4).map(|i| unit_link(&sp, i, i)).collect();
        let sel = linking_select(&coord, &coord, &d, 0.5, 0.5, &[vec![0, 1, 2, 3]], 4).unwrap();
        assert_eq!(sel.k, vec![0, 1, 2, 3]);
        assert!(sel.certificates.iter().all(|c| (c.direct - 1.0).abs() < 1e-12));
        assert!(sel.d_sum.links().is_some());
    }
}
