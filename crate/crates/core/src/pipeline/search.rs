//! The sweep over `C_{p,a}` with `p = 7 mod 8` prime.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{analyze, AnalyzeOptions, CurveCertificate, PipelineError, Status};
use crate::algebra::is_prime;
use crate::curve::family_curve;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRow {
    pub p: u64,
    pub a: i64,
    pub status: Status,
    pub reason: String,
    /// File name of the certificate, relative to the output directory.
    pub certificate: String,
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub analyze: AnalyzeOptions,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct FamilySearch {
    /// Ordered by `(p, a)`.
    pub rows: Vec<SearchRow>,
    /// One per row, same order.
    pub certificates: Vec<CurveCertificate>,
    pub cache_hits: usize,
}

impl FamilySearch {
    pub fn certified(&self) -> Vec<(u64, i64)> {
        self.rows.iter().filter(|r| r.status == Status::Certified).map(|r| (r.p, r.a)).collect()
    }
}

/// `SECTOBS_CACHE`, if set and nonempty.
pub fn cache_dir_from_env() -> Option<PathBuf> {
    std::env::var_os("SECTOBS_CACHE").filter(|v| !v.is_empty()).map(PathBuf::from)
}

pub fn certificate_name(p: u64, a: i64) -> String {
    format!("C_{p}_{a}.json")
}

/// Primes `p = 7 mod 8` up to `pmax` and `a` in range, skipping `a = 0, p, 2p`
/// where `F` has a repeated root.
pub fn family_pairs(pmax: u64, amin: i64, amax: i64) -> Vec<(u64, i64)> {
    let mut out = Vec::new();
    for p in (7..=pmax).step_by(8).filter(|&p| is_prime(&BigInt::from(p))) {
        for a in amin..=amax {
            if a != 0 && a != p as i64 && a != 2 * p as i64 {
                out.push((p, a));
            }
        }
    }
    out
}

fn cache_key(p: u64, a: i64, opts: &AnalyzeOptions) -> String {
    format!("p{p}_a{a}_h{}_c{}_b{}.json", opts.bounds.height, opts.bounds.cover, opts.point_bound)
}

fn cached(dir: &Path, key: &str) -> Option<CurveCertificate> {
    let text = fs::read_to_string(dir.join(key)).ok()?;
    CurveCertificate::from_json(&text).ok()
}

fn store(dir: &Path, key: &str, cert: &CurveCertificate) -> Result<(), PipelineError> {
    let io = |path: &Path, e| PipelineError::Io { path: path.display().to_string(), source: e };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
    fs::write(&tmp, cert.to_canonical_json()).map_err(|e| io(&tmp, e))?;
    let dst = dir.join(key);
    fs::rename(&tmp, &dst).map_err(|e| io(&dst, e))
}

fn run_pair(p: u64, a: i64, opts: &SearchOptions) -> Result<(CurveCertificate, bool), PipelineError> {
    let key = cache_key(p, a, &opts.analyze);
    if let Some(dir) = &opts.cache {
        if let Some(cert) = cached(dir, &key) {
            return Ok((cert, true));
        }
    }
    let curve = family_curve(p, a)?;
    let cert = analyze(&curve, opts.analyze);
    if let Some(dir) = &opts.cache {
        store(dir, &key, &cert)?;
    }
    Ok((cert, false))
}

/// Analyzes every pair, one worker per pair.
pub fn search_family(pmax: u64, amin: i64, amax: i64, opts: &SearchOptions) -> Result<FamilySearch, PipelineError> {
    if pmax < 7 {
        return Err(PipelineError::Input(format!("pmax = {pmax} is below the smallest prime 7 mod 8")));
    }
    if amin > amax {
        return Err(PipelineError::Input(format!("empty range {amin}..{amax}")));
    }
    let pairs = family_pairs(pmax, amin, amax);
    let sweep = || pairs.par_iter().map(|&(p, a)| run_pair(p, a, opts)).collect::<Result<Vec<_>, _>>();
    let results = match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| PipelineError::Input(format!("cannot start {n} workers: {e}")))?
            .install(sweep)?,
        None => sweep()?,
    };
    let mut rows = Vec::with_capacity(results.len());
    let mut certificates = Vec::with_capacity(results.len());
    let mut cache_hits = 0;
    for ((p, a), (cert, hit)) in pairs.into_iter().zip(results) {
        cache_hits += usize::from(hit);
        rows.push(SearchRow {
            p,
            a,
            status: cert.verdicts.status,
            reason: cert.verdicts.reason.clone(),
            certificate: certificate_name(p, a),
        });
        certificates.push(cert);
    }
    Ok(FamilySearch { rows, certificates, cache_hits })
}
