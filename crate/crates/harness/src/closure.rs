//! The closure pipeline: `L_f = g Λ_p(f U_p^l) / p^l` for `f = C0, uC0`,
//! read modulo `p^{4-l}`, with the scalars `γ_l, α_l, β_l` extracted from the
//! `q^0` and `q^1` coefficients.

use qcartier_core::{Dictionary, PadicRing, PrimeContext, Residues, Series, SeriesError};

/// One row `l` of the closure data.
#[derive(Clone, Debug)]
pub struct ClosureRow<R: PadicRing> {
    pub ell: u32,
    pub modulus_exponent: u32,
    pub l_c: Series<R>,
    pub l_u: Series<R>,
    /// Canonical representatives modulo `p^{4-l}`.
    pub gamma: u64,
    pub alpha: u64,
    pub beta: u64,
    /// First exponent where `L_C - γ uC0` is nonzero, with the coefficient.
    pub residual_c: Option<(i64, String)>,
    /// First exponent where `L_u - α C0 - β uC0` is nonzero.
    pub residual_u: Option<(i64, String)>,
}

impl<R: PadicRing> ClosureRow<R> {
    /// Highest exponent at which the residuals were examined.
    pub fn reach(&self) -> i64 {
        self.l_c.precision().min(self.l_u.precision()) - 1
    }
}

fn first_nonzero<R: PadicRing>(s: &Series<R>, k: u32) -> Result<Option<(i64, String)>, SeriesError> {
    Ok(s.first_nonvanishing(k)?.map(|n| {
        let c = s.coeff(n).unwrap_or_else(|| s.ring().zero());
        (n, s.ring().to_repr(&c))
    }))
}

/// `g Λ_p(f U) / p^l`, coarsened to `p^{4-l}`.
pub fn closure_series<R: PadicRing>(
    f: &Series<R>,
    g: &Series<R>,
    u_power: &Series<R>,
    ell: u32,
    ctx: &PrimeContext,
) -> Result<Series<R>, SeriesError> {
    let k = ctx.modulus_exponent - ell;
    let ring = u_power.ring();
    let lam = f.coarsen(ring)?.mul_cartier(u_power, ctx.p)?.divide_by_p_power(ell)?;
    let layer = ring.with_exponent(k)?;
    g.coarsen(&layer)?.mul(&lam.coarsen(&layer)?)
}

pub fn closure_rows<R: PadicRing>(
    dict: &Dictionary<R>,
    ctx: &PrimeContext,
    u_powers: &[Series<R>],
) -> Result<Vec<ClosureRow<R>>, SeriesError> {
    let mut rows = Vec::with_capacity(3);
    for ell in 1..=3u32 {
        let k = ctx.modulus_exponent - ell;
        let u = &u_powers[ell as usize - 1];
        let l_c = closure_series(dict.c0(), dict.g(), u, ell, ctx)?;
        let l_u = closure_series(dict.uc0(), dict.g(), u, ell, ctx)?;
        let ring = l_c.ring().clone();
        let c0 = dict.c0().coarsen(&ring)?;
        let uc0 = dict.uc0().coarsen(&ring)?;
        let at = |s: &Series<R>, n| s.coeff(n).unwrap_or_else(|| ring.zero());

        let gamma = at(&l_c, 1);
        let alpha = at(&l_u, 0);
        let beta = ring.sub(&at(&l_u, 1), &ring.mul(&alpha, &at(&c0, 1)));
        let res_c = l_c.sub(&uc0.scale(&gamma))?;
        let res_u = l_u.sub(&c0.scale(&alpha))?.sub(&uc0.scale(&beta))?;

        let target = Residues::new(ctx.p, k)?;
        let scalar = |x: &R::Elem| ring.reduce(x, &target);
        rows.push(ClosureRow {
            ell,
            modulus_exponent: k,
            gamma: scalar(&gamma)?,
            alpha: scalar(&alpha)?,
            beta: scalar(&beta)?,
            residual_c: first_nonzero(&res_c, k)?,
            residual_u: first_nonzero(&res_u, k)?,
            l_c,
            l_u,
        });
    }
    Ok(rows)
}
