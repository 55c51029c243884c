use super::{DistKind, Distribution1D};
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// ν-mass outside μ's support above which `H(ν | μ)` is declared infinite.
const OFF_SUPPORT_TOL: f64 = 1e-12;

fn is_density_kind(d: &Distribution1D) -> bool {
    !matches!(d.kind(), DistKind::Atoms { .. }) && !d.has_atoms()
}

/// `H(ν | μ) = ∫ ln(dν/dμ) dν`, `+∞` when `ν` is not absolutely continuous
/// with respect to `μ`.
pub fn relative_entropy(nu: &Distribution1D, mu: &Distribution1D, grid: &GridSpec) -> Result<f64> {
    if let (Some(a), Some(b)) = (nu.atom_list(), mu.atom_list()) {
        let mut h = 0.0;
        for (x, w) in a.iter() {
            let m = b.mass_at(x);
            if m == 0.0 {
                return Ok(f64::INFINITY);
            }
            h += w * (w / m).ln();
        }
        return Ok(h.max(0.0));
    }
    if !(is_density_kind(nu) && is_density_kind(mu)) {
        return Err(Error::Unsupported(
            "relative entropy needs two densities or two atom lists".into(),
        ));
    }
    let (s, t) = mu.support();
    let outside = nu.split(s).left.exp() + nu.split(t).right.exp();
    if outside > OFF_SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let integrand = |x: f64| {
        let lp = nu.ln_density(x);
        if lp == f64::NEG_INFINITY {
            return 0.0;
        }
        let lq = mu.ln_density(x);
        if lq == f64::NEG_INFINITY {
            return f64::INFINITY;
        }
        lp - lq
    };
    let r = nu.expect(integrand, grid.dyadic_depth(), &grid.divergence);
    if r.diverged {
        return Ok(f64::INFINITY);
    }
    Ok(r.value.max(0.0))
}
