//! Offline re-validation of a certificate from its recorded evidence.

use serde::Serialize;

use super::{decide_cert, CurveCertificate, RationalPoint};
use crate::algebra::{quad_is_square, Place, Rational};
use crate::curve::{factor_sextic, family_curve, lemma_conditions, two_torsion, Genus2Curve};
use crate::ellrank::{bielliptic_quotients, integralize, jacobian_rank, pullback, verify_descent, Quotient};
use crate::localpoints::{relevant_primes, verify_report};
use crate::mudescent::{classes_product, f2_rank, mu, saturation_check, BooleanClass, KernelVerdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.ok).collect()
    }

    fn push(&mut self, name: &str, r: Result<(), String>) {
        let (ok, detail) = match r {
            Ok(()) => (true, String::new()),
            Err(e) => (false, e),
        };
        self.checks.push(Check { name: name.to_string(), ok, detail });
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Replays every piece of evidence in the certificate. Nothing is searched
/// for again except refuted residue discs, which carry no witness.
pub fn verify_certificate(cert: &CurveCertificate) -> VerifyReport {
    let mut rep = VerifyReport { checks: Vec::new() };
    let model = match Genus2Curve::new(cert.curve.model.coeffs().to_vec()) {
        Ok(c) => c,
        Err(e) => {
            rep.push("curve", Err(e.to_string()));
            return rep;
        }
    };
    let c = match cert.curve.model.family() {
        Some(f) => match family_curve(f.p, f.a) {
            Ok(fc) if fc.coeffs() == model.coeffs() => fc,
            _ => {
                rep.push("curve", Err("family parameters do not match the coefficients".into()));
                return rep;
            }
        },
        None => model,
    };
    rep.push("curve", Ok(()));
    check_curve(cert, &c, &mut rep);
    check_local(cert, &c, &mut rep);
    check_quotients(cert, &c, &mut rep);
    check_mu_and_kernel(cert, &c, &mut rep);
    let again = decide_cert(cert);
    rep.push(
        "verdicts",
        ensure(again == cert.verdicts, format!("evidence gives {} ({}), certificate says {}", again.status, again.reason, cert.verdicts.status)),
    );
    rep
}

fn check_curve(cert: &CurveCertificate, c: &Genus2Curve, rep: &mut VerifyReport) {
    let fs = factor_sextic(c).ok();
    rep.push("factorization", ensure(fs == cert.curve.factorization, "factorization does not match"));
    rep.push(
        "lemma",
        ensure(fs.as_ref().map(lemma_conditions) == cert.lemma, "lemma conditions do not match"),
    );
    rep.push("torsion", ensure(fs.as_ref().map(two_torsion) == cert.torsion, "2-torsion does not match"));
    let pt = match &cert.curve.rational_point {
        None => Ok(()),
        Some(RationalPoint::Affine { x, y }) => ensure(c.contains(x, y), "listed rational point is not on the curve"),
        Some(RationalPoint::Infinity { sqrt_leading }) => {
            ensure(&(sqrt_leading * sqrt_leading) == c.leading(), "leading coefficient is not the listed square")
        }
    };
    rep.push("rational_point", pt);
}

fn check_local(cert: &CurveCertificate, c: &Genus2Curve, rep: &mut VerifyReport) {
    let local = &cert.local;
    if local.error.is_some() {
        rep.push("local", ensure(!local.everywhere_locally_solvable, "undecided places cannot be solvable"));
        return;
    }
    let mut places = vec![Place::Real];
    places.extend(relevant_primes(c).into_iter().map(Place::Prime));
    let listed: Vec<Place> = local.reports.iter().map(|r| r.place).collect();
    rep.push("local_places", ensure(listed == places, "reports do not cover the real place and the relevant primes"));
    for r in &local.reports {
        rep.push(&format!("local {}", r.place), verify_report(c, r));
    }
    let all = local.reports.iter().all(|r| r.solvable);
    rep.push("local_verdict", ensure(all == local.everywhere_locally_solvable, "solvability flag disagrees with the reports"));
}

fn check_quotients(cert: &CurveCertificate, c: &Genus2Curve, rep: &mut VerifyReport) {
    let Some(q) = &cert.quotients else { return };
    let (Some(d1), Some(d2)) = (&q.e1, &q.e2) else { return };
    let models = bielliptic_quotients(c)
        .map_err(|e| e.to_string())
        .and_then(|(r1, r2)| Ok((integralize(&r1).map_err(|e| e.to_string())?, integralize(&r2).map_err(|e| e.to_string())?)));
    match models {
        Ok((e1, e2)) => {
            rep.push("quotient E1", ensure(e1 == d1.curve, "E1 model does not match"));
            rep.push("quotient E2", ensure(e2 == d2.curve, "E2 model does not match"));
        }
        Err(e) => rep.push("quotients", Err(e)),
    }
    rep.push("descent E1", verify_descent(d1));
    rep.push("descent E2", verify_descent(d2));
    rep.push("jacobian_rank", ensure(q.jacobian_rank == jacobian_rank(d1.rank, d2.rank), "Jacobian rank is not the sum"));
}

fn check_mu_and_kernel(cert: &CurveCertificate, c: &Genus2Curve, rep: &mut VerifyReport) {
    let (Some(gens), Some(k), Some(fs), Some(q)) = (&cert.mu, &cert.kernel, &cert.curve.factorization, &cert.quotients)
    else {
        return;
    };
    let (Some(d1), Some(d2)) = (&q.e1, &q.e2) else { return };
    for g in gens {
        let r = (|| {
            ensure(g.divisor.is_on(c), "divisor is not on the curve")?;
            let again = mu(c, fs, &g.divisor).map_err(|e| e.to_string())?;
            ensure(again == g.mu, "image does not match")?;
            // P1_k and P2_k are pullbacks of the listed generators
            let source = g.label.strip_prefix("P1_").map(|i| (Quotient::E1, d1, i)).or_else(|| {
                g.label.strip_prefix("P2_").map(|i| (Quotient::E2, d2, i))
            });
            if let Some((which, d, i)) = source {
                let i: usize = i.parse().map_err(|_| "bad label")?;
                let p = d.generators.get(i - 1).ok_or("label outside the generator list")?;
                let back = pullback(c, which, &d.curve.to_raw(&Some(p.clone()))).map_err(|e| e.to_string())?;
                ensure(back == g.divisor, "divisor is not the pullback of the generator")?;
            }
            Ok(())
        })();
        rep.push(&format!("mu {}", g.label), r);
    }
    let images: Vec<BooleanClass> = gens.iter().map(|g| g.mu.clone()).collect();
    for rel in &k.relations {
        let picked: Vec<&BooleanClass> = rel.indices.iter().filter_map(|&i| images.get(i)).collect();
        let r = (|| {
            ensure(picked.len() == rel.indices.len() && !picked.is_empty(), "relation index out of range")?;
            let w = Rational::from_integer(rel.witness.clone());
            for z in &classes_product(&picked).components {
                ensure(quad_is_square(&z.scale(&w)).map_err(|e| e.to_string())?, "witness does not make the product a square")?;
            }
            Ok(())
        })();
        rep.push(&format!("relation {:?}", rel.indices), r);
    }
    // the rank is decided by exhausting subset products against the
    // closed-form triviality test
    let rank = f2_rank(&images).map_err(|e| e.to_string());
    rep.push(
        "f2_rank",
        rank.and_then(|(r, rels)| ensure(r == k.f2_rank && rels == k.relations, format!("rank replays as {r}"))),
    );
    let expected = d1.rank.unwrap_or(0) as usize + d2.rank.unwrap_or(0) as usize + cert.torsion.as_ref().map_or(0, |t| t.dim as usize);
    rep.push("expected_rank", ensure(expected == k.expected, "expected rank is not rank J(Q) + dim J(Q)[2]"));
    let verdict = if k.f2_rank == k.expected {
        ensure(k.saturation.is_none() && k.verdict == KernelVerdict::Equal, "full rank must give ker mu = 2J(Q)")
    } else {
        match saturation_check(c, fs, d1, d2) {
            Ok(s) => {
                let want = if s.saturated { KernelVerdict::Larger } else { KernelVerdict::Unknown };
                ensure(Some(&s) == k.saturation.as_ref() && k.verdict == want, "saturation evidence does not replay")
            }
            Err(e) => Err(e.to_string()),
        }
    };
    rep.push("kernel_verdict", verdict);
}
