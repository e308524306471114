//! Comparison helpers for unordered complex data and projective vectors.

use crate::scalar::C64;

/// Greedy nearest-neighbour matching between two complex multisets.
///
/// Elements of `left` are visited in lexicographic `(re, im)` order; each is
/// paired with the closest unused element of `right`, distance ties broken by
/// the lexicographic order of the candidates. Returns the largest matched
/// distance, or `None` when the sizes differ or some element has no partner
/// within `tol`.
pub fn match_multisets(left: &[C64], right: &[C64], tol: f64) -> Option<f64> {
    if left.len() != right.len() {
        return None;
    }
    let mut order: Vec<usize> = (0..left.len()).collect();
    order.sort_by(|&a, &b| lex(&left[a], &left[b]));
    let mut used = vec![false; right.len()];
    let mut worst: f64 = 0.0;
    for &i in &order {
        let mut best: Option<(f64, usize)> = None;
        for (j, candidate) in right.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (left[i] - candidate).norm();
            let better = match best {
                None => true,
                Some((bd, bj)) => {
                    d < bd || (d == bd && lex(candidate, &right[bj]) == std::cmp::Ordering::Less)
                }
            };
            if better {
                best = Some((d, j));
            }
        }
        let (d, j) = best?;
        if d > tol {
            return None;
        }
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}

fn lex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(std::cmp::Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
}

/// Hermitian inner product, conjugate-linear in the first argument.
pub fn hermitian_dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Sine of the principal angle between the complex lines spanned by `a` and
/// `b`: zero exactly when the vectors are proportional, and scale free.
pub fn projective_distance(a: &[C64], b: &[C64]) -> f64 {
    let na = vec_norm(a);
    let nb = vec_norm(b);
    if na == 0.0 || nb == 0.0 {
        return 1.0;
    }
    let cosine = (hermitian_dot(a, b).norm() / (na * nb)).min(1.0);
    (1.0 - cosine * cosine).max(0.0).sqrt()
}
