//! Complex polynomial roots by the Aberth–Ehrlich iteration.
//!
//! Coefficients are stored in ascending order: `c[0] + c[1] z + … + c[n] z^n`.

use num_complex::Complex;

use crate::scalar::{cis, czero, Real};

/// Value and derivative at `z` by Horner's scheme.
pub fn eval_with_derivative<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = czero();
    let mut dp = czero();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + *c;
    }
    (p, dp)
}

fn trim<T: Real>(coeffs: &[Complex<T>]) -> &[Complex<T>] {
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].norm() == T::zero() {
        end -= 1;
    }
    &coeffs[..end]
}

/// All complex roots, repeated according to (numerical) multiplicity.
pub fn roots<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    let coeffs = trim(coeffs);
    if coeffs.len() <= 1 {
        return Vec::new();
    }
    let zero_roots = coeffs.iter().take_while(|c| c.norm() == T::zero()).count();
    let reduced = &coeffs[zero_roots..];
    let deg = reduced.len() - 1;
    let mut out = vec![czero(); zero_roots];
    if deg == 0 {
        return out;
    }
    let lead = reduced[deg].norm();
    let radius = (reduced[0].norm() / lead).powf(T::one() / T::from_index(deg));
    let two_pi = T::PI() + T::PI();
    let mut z: Vec<Complex<T>> = (0..deg)
        .map(|k| {
            let angle = two_pi * T::from_index(k) / T::from_index(deg) + T::lit(0.4);
            cis(angle) * radius
        })
        .collect();
    let eps = T::epsilon() * T::lit(16.0);
    for _ in 0..2000 {
        let mut converged = true;
        for k in 0..deg {
            let (p, dp) = eval_with_derivative(reduced, z[k]);
            if p.norm() == T::zero() {
                continue;
            }
            let ratio = p / dp;
            let mut sum = czero();
            for (j, zj) in z.iter().enumerate() {
                if j != k {
                    sum += (z[k] - *zj).inv();
                }
            }
            let w = ratio / (Complex::new(T::one(), T::zero()) - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() > eps * z[k].norm().max(T::one()) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    out.extend(z);
    out
}

/// Groups roots closer than `radius · max(1, |z|)` into clusters and returns
/// `(centroid, size)` pairs.
pub fn cluster_roots<T: Real>(roots: &[Complex<T>], radius: T) -> Vec<(Complex<T>, usize)> {
    let mut parent: Vec<usize> = (0..roots.len()).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let scale = roots[i].norm().max(roots[j].norm()).max(T::one());
            if (roots[i] - roots[j]).norm() <= radius * scale {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: Vec<(usize, Complex<T>, usize)> = Vec::new();
    for i in 0..roots.len() {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += roots[i];
                g.2 += 1;
            }
            None => groups.push((r, roots[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, s, m)| (s / T::from_index(m), m))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn roots_of_cubic() {
        let r = roots(&[c(-6.0), c(11.0), c(-6.0), c(1.0)]);
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in re.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn double_root_clusters() {
        let r = roots(&[c(1.0), c(2.0), c(1.0)]);
        let clusters = cluster_roots(&r, 1e-6);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].1, 2);
        assert!((clusters[0].0 + c(1.0)).norm() < 1e-7);
    }

    #[test]
    fn roots_of_unity() {
        let mut coeffs = vec![c(0.0); 9];
        coeffs[0] = c(-1.0);
        coeffs[8] = c(1.0);
        for z in roots(&coeffs) {
            assert!((z.powu(8) - c(1.0)).norm() < 1e-12);
        }
        assert_eq!(cluster_roots(&roots(&coeffs), 1e-6).len(), 8);
    }
}
