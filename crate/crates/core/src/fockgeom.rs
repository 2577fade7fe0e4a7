//! Stereographic projection of momentum space onto S³, the kinematic scalars
//! (u, v, w, θ₀, x) and pointwise four-dimensional harmonics.

use rug::Float;

use crate::error::{Error, Result};
use crate::exactmath::{factorial_exact, gegenbauer_homogeneous, racah_solid, Complex, PrecisionContext, Real};

pub type Vec3 = [Real; 3];

pub fn vec3(x: &Real, y: &Real, z: &Real) -> Vec3 {
    [x.clone(), y.clone(), z.clone()]
}

pub fn norm2(v: &Vec3) -> Real {
    let p = v[0].prec();
    Float::with_val(p, v[0].square_ref()) + Float::with_val(p, v[1].square_ref()) + Float::with_val(p, v[2].square_ref())
}

fn sub3(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0].clone() - &b[0], a[1].clone() - &b[1], a[2].clone() - &b[2]]
}

/// Exponent pair of a hydrogen-like or Sturmian transition: initial radial
/// functions decay like e^{-alpha r}, final ones like e^{-beta r}.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    pub alpha: Real,
    pub beta: Real,
    pub u: Real,
}

impl Channel {
    pub fn new(alpha: Real, beta: Real) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() || alpha <= 0 || beta <= 0 {
            return Err(Error::InvalidChannel(format!(
                "alpha and beta must be finite and positive (alpha={}, beta={})",
                alpha.to_f64(),
                beta.to_f64()
            )));
        }
        let u = Float::with_val(alpha.prec(), &alpha / &beta);
        Ok(Channel { alpha, beta, u })
    }

    /// Hydrogen-like exponents alpha = Z/(n+1), beta = Z/(nf+1).
    pub fn hydrogen(z: &Real, n: u32, nf: u32, ctx: &PrecisionContext) -> Result<Self> {
        let alpha = ctx.real(z) / (n + 1);
        let beta = ctx.real(z) / (nf + 1);
        Channel::new(alpha, beta)
    }
}

/// Derived scalars for a given channel and momentum transfer.
#[derive(Clone, Debug, PartialEq)]
pub struct Kinematics {
    pub kvec: Vec3,
    pub kmag: Real,
    pub u: Real,
    /// sqrt((beta-alpha)^2 + k^2)
    pub k4: Real,
    pub v: Real,
    pub w: Real,
    pub cos_theta0: Real,
    pub sin_theta0: Real,
    /// set when alpha = beta and k = 0, where θ₀ is 0/0 and (1, 0) is used
    pub theta0_degenerate: bool,
    /// Gegenbauer argument (w² − (u+1)/2)/(v w); None at v = 0
    pub x_geg: Option<Real>,
    pub theta: Real,
    pub phi: Real,
}

pub fn kinematics_of(ch: &Channel, kvec: &Vec3, ctx: &PrecisionContext) -> Kinematics {
    let b = ctx.bits;
    let k2 = Float::with_val(b, norm2(kvec));
    let kmag = Float::with_val(b, k2.sqrt_ref());
    let d = Float::with_val(b, &ch.beta - &ch.alpha);
    let k4 = (Float::with_val(b, d.square_ref()) + &k2).sqrt();
    let two_beta = Float::with_val(b, &ch.beta * 2u32);
    let v = Float::with_val(b, &k4 / &two_beta);
    let s = Float::with_val(b, &ch.alpha + &ch.beta);
    let w = (Float::with_val(b, s.square_ref()) + &k2).sqrt() / &two_beta;
    let u = ctx.real(&ch.u);
    let (cos_theta0, sin_theta0, degenerate) = if k4.is_zero() {
        (ctx.one(), ctx.zero(), true)
    } else if kmag.is_zero() {
        let c = if d.is_sign_negative() { -ctx.one() } else { ctx.one() };
        (c, ctx.zero(), false)
    } else {
        (Float::with_val(b, &d / &k4), Float::with_val(b, &kmag / &k4), false)
    };
    let x_geg = if v.is_zero() {
        None
    } else {
        let num = Float::with_val(b, w.square_ref()) - (u.clone() + 1u32) / 2u32;
        Some(num / Float::with_val(b, &v * &w))
    };
    let rho = Float::with_val(b, kvec[0].square_ref()) + Float::with_val(b, kvec[1].square_ref());
    let rho = rho.sqrt();
    let theta = Float::with_val(b, rho.atan2_ref(&kvec[2]));
    let phi = Float::with_val(b, kvec[1].atan2_ref(&kvec[0]));
    Kinematics {
        kvec: kvec.clone(),
        kmag,
        u,
        k4,
        v,
        w,
        cos_theta0,
        sin_theta0,
        theta0_degenerate: degenerate,
        x_geg,
        theta,
        phi,
    }
}

/// Point on S³, stored as (y1, y2, y3, y0).
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVec4 {
    pub c: [Real; 4],
}

impl UnitVec4 {
    pub fn norm(&self) -> Real {
        let p = self.c[0].prec();
        let mut s = Float::new(p);
        for x in &self.c {
            s += Float::with_val(p, x.square_ref());
        }
        s.sqrt()
    }
}

/// ŷ = (2βp⃗, β² − p²)/(β² + p²).
pub fn project_y(pvec: &Vec3, beta: &Real, ctx: &PrecisionContext) -> UnitVec4 {
    let b = ctx.bits;
    let p2 = Float::with_val(b, norm2(pvec));
    let b2 = Float::with_val(b, beta.square_ref());
    let den = Float::with_val(b, &b2 + &p2);
    let tb = Float::with_val(b, beta * 2u32) / &den;
    UnitVec4 {
        c: [
            Float::with_val(b, &pvec[0] * &tb),
            Float::with_val(b, &pvec[1] * &tb),
            Float::with_val(b, &pvec[2] * &tb),
            (b2 - p2) / den,
        ],
    }
}

/// x̂: the projection of p⃗ − k⃗ with scale alpha.
pub fn project_x(pvec: &Vec3, kvec: &Vec3, alpha: &Real, ctx: &PrecisionContext) -> UnitVec4 {
    project_y(&sub3(pvec, kvec), alpha, ctx)
}

/// (2β/(β² + p²))³.
pub fn surface_jacobian(pvec: &Vec3, beta: &Real, ctx: &PrecisionContext) -> Real {
    let b = ctx.bits;
    let den = Float::with_val(b, beta.square_ref()) + norm2(pvec);
    let r = Float::with_val(b, beta * 2u32) / den;
    Float::with_val(b, r.square_ref()) * r
}

fn check_nlm(n: u32, l: u32, m: i64) -> Result<()> {
    if l > n {
        return Err(Error::BadQuantumNumbers(format!("l exceeds n (n={n}, l={l})")));
    }
    if m.unsigned_abs() > l as u64 {
        return Err(Error::BadQuantumNumbers(format!("|m| exceeds l (l={l}, m={m})")));
    }
    Ok(())
}

/// Solid form |y|^n C_nlm(y/|y|) of the hyperspherical harmonic, a harmonic
/// polynomial of degree n in the four components.
pub fn hsh_solid(n: u32, l: u32, m: i64, y: &[Real; 4], ctx: &PrecisionContext) -> Result<Complex> {
    check_nlm(n, l, m)?;
    let b = ctx.bits;
    let mut r2 = Float::new(b);
    for x in y {
        r2 += Float::with_val(b, x.square_ref());
    }
    let h = gegenbauer_homogeneous(l + 1, n - l, &y[3], &r2, ctx).pop().unwrap();
    // (2l)!! sqrt((2l+1)(n-l)!/(n+l+1)!)
    let mut dd = rug::Integer::from(1);
    for k in 1..=l {
        dd *= 2 * k;
    }
    let ratio = rug::Rational::from((factorial_exact(n - l) * (2 * l + 1), factorial_exact(n + l + 1)));
    let norm = Float::with_val(b, ratio).sqrt() * dd;
    let sh = racah_solid(l as i64, m, &y[0], &y[1], &y[2], ctx);
    Ok(sh.scale(&(h * norm)))
}

/// Renormalised harmonic C_nlm(ŷ) with C_nlm(e) = sqrt(n+1) δ_l0.
pub fn hsh_evaluate(n: u32, l: u32, m: i64, y: &UnitVec4, ctx: &PrecisionContext) -> Result<Complex> {
    hsh_solid(n, l, m, &y.c, ctx)
}

/// Orthonormal Y_nlm = (−1)^{n−l} sqrt((n+1)/(2π²)) C_nlm.
pub fn hsh_normalized(n: u32, l: u32, m: i64, y: &UnitVec4, ctx: &PrecisionContext) -> Result<Complex> {
    let c = hsh_evaluate(n, l, m, y, ctx)?;
    let pi = ctx.pi();
    let mut f = (ctx.int(n as i64 + 1) / (Float::with_val(ctx.bits, pi.square_ref()) * 2u32)).sqrt();
    if (n - l) % 2 == 1 {
        f = -f;
    }
    Ok(c.scale(&f))
}
