//! Validation suites behind `hydroform validate`. Each check prints one line
//! with its worst residual and bound.

use std::io::Write;

use clap::ValueEnum;
use hydroform::exactmath::{Complex, PrecisionContext, Real};
use hydroform::fockgeom::Channel;
use hydroform::formfactor::{form_factor, radial_matrix_element, BoundLabel, TransitionSpec};
use hydroform::oracle::{expansion_check, laplace_fd_check, measured_orders, radial_quadrature_many, RadialTerm};
use hydroform::pcoeff::{p_gegenbauer, p_series, rel_diff, PIndex, PValue};
use hydroform::recurrence::{
    propagate_lattice, residual_fixed_angular, residual_l2_step, residual_rec1_first, residual_rec1_second,
};
use hydroform::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Backends,
    Recurrences,
    Orthogonality,
    Oracle,
    Expansion,
    All,
}

struct Report<'a> {
    out: &'a mut dyn Write,
    ok: bool,
}

impl Report<'_> {
    fn line(&mut self, name: &str, residual: f64, bound: f64, pass: bool) {
        self.ok &= pass;
        let verdict = if pass { "ok" } else { "FAIL" };
        let _ = writeln!(self.out, "{name:<40} residual {residual:.3e}  bound {bound:.1e}  {verdict}");
    }
}

const UW: [(&str, &str); 4] = [("0.5", "0.9"), ("1", "1"), ("1.3", "1.8"), ("2", "1.7")];

fn indices(nmax: u32) -> Vec<PIndex> {
    let mut v = Vec::new();
    for n in 0..nmax {
        for l in 0..=n {
            for n3 in 0..nmax {
                for l3 in 0..=n3 {
                    for l2 in 0..=l + l3 + 1 {
                        v.push(PIndex { n, l, n3, l3, l2 });
                    }
                }
            }
        }
    }
    v
}

fn backends(r: &mut Report, nmax: u32, ctx: &PrecisionContext) -> Result<()> {
    let tol = ctx.tol_half();
    let mut worst = ctx.zero();
    let mut pass = true;
    for (us, ws) in UW {
        for i in indices(nmax) {
            let mut c = *ctx;
            let mut d = Real::with_val(ctx.bits, f64::INFINITY);
            for _ in 0..3 {
                let (u, w) = (c.parse(us)?, c.parse(ws)?);
                d = rel_diff(&p_series(i, &u, &w, &c)?.value, &p_gegenbauer(i, &u, &w, &c)?.value);
                if d <= tol {
                    break;
                }
                c = c.doubled();
            }
            pass &= d <= tol;
            if d > worst {
                worst = d;
            }
        }
    }
    r.line("backends series-vs-gegenbauer", worst.to_f64(), tol.to_f64(), pass);
    Ok(())
}

fn recurrences(r: &mut Report, nmax: u32, ctx: &PrecisionContext) -> Result<()> {
    let tol = ctx.tol_half();
    type Rel = fn(PIndex, &Real, &Real, &PrecisionContext) -> Result<Real>;
    let rels: [(&str, Rel); 4] = [
        ("recurrences rec1-first", residual_rec1_first),
        ("recurrences rec1-second", residual_rec1_second),
        ("recurrences l2-step", residual_l2_step),
        ("recurrences fixed-angular", residual_fixed_angular),
    ];
    for (name, f) in rels {
        let mut worst = ctx.zero();
        for (us, ws) in UW {
            let (u, w) = (ctx.parse(us)?, ctx.parse(ws)?);
            for i in indices(nmax) {
                match f(i, &u, &w, ctx) {
                    Ok(v) if v > worst => worst = v,
                    Ok(_) | Err(Error::IndexViolation(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
        r.line(name, worst.to_f64(), tol.to_f64(), worst <= tol);
    }
    let tol = ctx.tol_quarter();
    let mut worst = ctx.zero();
    let (u, w) = (ctx.parse("0.8")?, ctx.parse("1.1")?);
    let top = nmax.saturating_sub(1);
    for (l, l3, l2) in [(0, 0, 0), (0, 1, 1), (1, 1, 0)] {
        let seeds: Vec<PValue> = (l3..=l3 + 2 * top + 2)
            .map(|n3| p_series(PIndex { n: l, l, n3, l3, l2 }, &u, &w, ctx))
            .collect::<Result<_>>()?;
        for n in l..=l.max(top) {
            for n3 in l3..=l3.max(top) {
                let target = PIndex { n, l, n3, l3, l2 };
                let got = propagate_lattice(&seeds, target, &u, &w, ctx)?;
                let d = rel_diff(&got.value.value, &p_series(target, &u, &w, ctx)?.value);
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    r.line("recurrences propagate-lattice", worst.to_f64(), tol.to_f64(), worst <= tol);
    Ok(())
}

fn orthogonality(r: &mut Report, nmax: u32, ctx: &PrecisionContext) -> Result<()> {
    let mut states = Vec::new();
    for n in 0..nmax {
        for l in 0..=n {
            for m in -(l as i64)..=l as i64 {
                states.push(BoundLabel::new(n, l, m)?);
            }
        }
    }
    let zero = [ctx.zero(), ctx.zero(), ctx.zero()];
    let mut worst = 0.0f64;
    for i in &states {
        for f in &states {
            let t = TransitionSpec::hydrogen(&ctx.one(), *i, *f, ctx)?;
            let v = form_factor(&t, &zero, ctx)?.value;
            let want = if i == f { ctx.one() } else { ctx.zero() };
            worst = worst.max(v.sub(&Complex::from_real(want)).abs().to_f64());
        }
    }
    r.line("orthogonality F(k=0) = delta", worst, 1e-10, worst <= 1e-10);
    Ok(())
}

fn oracle(r: &mut Report, nmax: u32, ctx: &PrecisionContext) -> Result<()> {
    let mut worst = 0.0f64;
    for k in ["0.1", "1", "10"] {
        let kmag = ctx.parse(k)?;
        for n in 0..nmax {
            for nf in 0..nmax {
                for hydrogen in [true, false] {
                    let ch = if hydrogen { Channel::hydrogen(&ctx.one(), n, nf, ctx)? } else { Channel::new(ctx.one(), ctx.one())? };
                    let mut terms = Vec::new();
                    for l in 0..=n {
                        for lf in 0..=nf {
                            for l2 in (l.abs_diff(lf)..=l + lf).step_by(2) {
                                terms.push(RadialTerm { n, l, nf, lf, l2 });
                            }
                        }
                    }
                    let q = radial_quadrature_many(&ch, &terms, &kmag, ctx)?;
                    for (t, est) in terms.iter().zip(&q) {
                        let i = BoundLabel::new(t.n, t.l, 0)?;
                        let f = BoundLabel::new(t.nf, t.lf, 0)?;
                        let spec = if hydrogen {
                            TransitionSpec::hydrogen(&ctx.one(), i, f, ctx)?
                        } else {
                            TransitionSpec::sturmian(ctx.one(), ctx.one(), i, f)?
                        };
                        worst = worst.max(est.rel_error(&radial_matrix_element(&spec, t.l2, &kmag, ctx)?));
                    }
                }
            }
        }
    }
    r.line("oracle radial quadrature", worst, 1e-8, worst <= 1e-8);
    Ok(())
}

fn expansion(r: &mut Report, nmax: u32, ctx: &PrecisionContext) -> Result<()> {
    // v ≈ 0.16, |(k, β−α)|/|(p, β)| ≈ 0.2
    let ch = Channel::new(ctx.parse("1")?, ctx.parse("1.1")?)?;
    let kv = ["0.1", "-0.2", "0.25"].map(|s| ctx.parse(s).unwrap());
    let pv = ["0.8", "1.0", "-0.5"].map(|s| ctx.parse(s).unwrap());
    let mut worst = 0.0f64;
    for n in 0..nmax.min(4) {
        for l in 0..=n {
            for m in -(l as i64)..=l as i64 {
                let (lhs, rhs) = expansion_check(n, l, m, &ch, &kv, &pv, n + 12, ctx)?;
                worst = worst.max(lhs.sub(&rhs).abs().to_f64() / lhs.abs().to_f64());
            }
        }
    }
    r.line("expansion truncation at n3 = n+12", worst, 1e-6, worst <= 1e-6);
    let mut order = f64::INFINITY;
    for n in 0..nmax {
        for l in 0..=n {
            let rs: Vec<Real> = ["1e-2", "5e-3", "2.5e-3"]
                .iter()
                .map(|h| laplace_fd_check(n, l, 0, &ch, &kv, &pv, &ctx.parse("0.9")?, &ctx.parse(h)?, ctx))
                .collect::<Result<_>>()?;
            order = measured_orders(&rs).into_iter().fold(order, f64::min);
        }
    }
    r.line("expansion laplace FD order", order, 1.9, order >= 1.9);
    Ok(())
}

/// Runs the suite; Ok(false) when a check failed.
pub fn run(suite: Suite, nmax: u32, ctx: &PrecisionContext, out: &mut dyn Write) -> Result<bool> {
    if nmax == 0 {
        return Err(Error::InvalidArgument("--nmax must be at least 1".into()));
    }
    let mut r = Report { out, ok: true };
    let all = suite == Suite::All;
    if all || suite == Suite::Backends {
        backends(&mut r, nmax, ctx)?;
    }
    if all || suite == Suite::Recurrences {
        recurrences(&mut r, nmax, ctx)?;
    }
    if all || suite == Suite::Orthogonality {
        orthogonality(&mut r, nmax, ctx)?;
    }
    if all || suite == Suite::Oracle {
        oracle(&mut r, nmax, ctx)?;
    }
    if all || suite == Suite::Expansion {
        expansion(&mut r, nmax, ctx)?;
    }
    Ok(r.ok)
}
