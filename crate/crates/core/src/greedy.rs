//! The greedy loop: `t` rounds, each adding the (1+τ)-best candidate proposed
//! by a selector.

use std::io::{BufRead, Write};

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{distinct_count, NearestCache};
use crate::diagnostics::{certify_round, ConditionCertificate, ReferenceSolution};
use crate::error::{Error, Result};
use crate::metric::{Point, PointSpace};
use crate::rng::{Fingerprint, RngStream};
use crate::select::{Selector, SelectorSpec};
use crate::serde_util::{finite_or_null, hex_u64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub rounds: usize,
    #[serde(default)]
    pub tau: f64,
    pub selector: SelectorSpec,
    #[serde(default)]
    pub initial_centers: Vec<Point>,
    #[serde(default)]
    pub seed: u64,
    /// Keep every round's candidate set in the trace (needed by audits).
    #[serde(default)]
    pub record_candidates: bool,
}

impl GreedyConfig {
    pub fn new(rounds: usize, selector: SelectorSpec) -> Self {
        GreedyConfig {
            rounds,
            tau: 0.0,
            selector,
            initial_centers: Vec::new(),
            seed: 0,
            record_candidates: false,
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_initial_centers(mut self, centers: Vec<Point>) -> Self {
        self.initial_centers = centers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn recording_candidates(mut self) -> Self {
        self.record_candidates = true;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    /// `None` for a skipped round.
    pub center: Option<Point>,
    pub cost: f64,
    pub candidates: usize,
    pub rng_fingerprint: u64,
    pub skipped: bool,
    pub zero_cost: bool,
    pub candidate_set: Option<Vec<Point>>,
    pub certificate: Option<ConditionCertificate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreedyTrace {
    pub data_fingerprint: u64,
    pub selector: String,
    pub initial_centers: Vec<Point>,
    /// `φ_X(C_0)`, +∞ when `C_0` is empty.
    pub initial_cost: f64,
    pub rounds: Vec<RoundRecord>,
    pub centers: Vec<Point>,
}

/// Order-sensitive hash of a data set.
pub fn data_fingerprint(points: &[Point]) -> u64 {
    let mut fp = Fingerprint::new();
    fp.write_u64(points.len() as u64);
    for p in points {
        match p {
            Point::Index(i) => fp.write_u64(*i as u64),
            Point::Coords(c) => c.iter().for_each(|v| fp.write_f64(*v)),
        }
    }
    fp.finish()
}

impl GreedyTrace {
    /// Cost after each round.
    pub fn costs(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.cost).collect()
    }

    pub fn final_cost(&self) -> f64 {
        self.rounds.last().map_or(self.initial_cost, |r| r.cost)
    }

    pub fn distinct_centers(&self) -> usize {
        distinct_count(&self.centers)
    }

    /// Hash over centers and per-round costs.
    pub fn fingerprint(&self) -> u64 {
        let mut fp = Fingerprint::new();
        fp.write_u64(self.data_fingerprint);
        fp.write_f64(self.initial_cost);
        for r in &self.rounds {
            fp.write_u64(r.round as u64);
            fp.write_f64(r.cost);
            fp.write_u64(r.candidates as u64);
            fp.write_u64(r.rng_fingerprint);
        }
        for c in &self.centers {
            match c {
                Point::Index(i) => fp.write_u64(*i as u64),
                Point::Coords(v) => v.iter().for_each(|x| fp.write_f64(*x)),
            }
        }
        fp.finish()
    }

    /// JSON lines: a round-0 header carrying `C_0`, then one record per round.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        let header = JsonRecord {
            round: 0,
            cost: self.initial_cost,
            center: None,
            candidates: 0,
            skipped: false,
            zero_cost: false,
            rng: None,
            candidate_set: None,
            certificate: None,
            header: Some(JsonHeader {
                initial_centers: self.initial_centers.clone(),
                data_fingerprint: self.data_fingerprint,
                selector: self.selector.clone(),
            }),
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for r in &self.rounds {
            let rec = JsonRecord {
                round: r.round,
                cost: r.cost,
                center: r.center.clone(),
                candidates: r.candidates,
                skipped: r.skipped,
                zero_cost: r.zero_cost,
                rng: Some(r.rng_fingerprint),
                candidate_set: r.candidate_set.clone(),
                certificate: r.certificate,
                header: None,
            };
            serde_json::to_writer(&mut w, &rec)?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut header = None;
        let mut initial_cost = f64::INFINITY;
        let mut rounds = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: JsonRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                path: "<trace>".into(),
                line: lineno as u64 + 1,
                msg: e.to_string(),
            })?;
            if let Some(h) = rec.header {
                initial_cost = rec.cost;
                header = Some(h);
                continue;
            }
            rounds.push(RoundRecord {
                round: rec.round,
                center: rec.center,
                cost: rec.cost,
                candidates: rec.candidates,
                rng_fingerprint: rec.rng.unwrap_or(0),
                skipped: rec.skipped,
                zero_cost: rec.zero_cost,
                candidate_set: rec.candidate_set,
                certificate: rec.certificate,
            });
        }
        let header = header.ok_or_else(|| Error::Parse {
            path: "<trace>".into(),
            line: 1,
            msg: "missing round-0 header record".into(),
        })?;
        let mut centers = header.initial_centers.clone();
        centers.extend(rounds.iter().filter_map(|r| r.center.clone()));
        Ok(GreedyTrace {
            data_fingerprint: header.data_fingerprint,
            selector: header.selector,
            initial_centers: header.initial_centers,
            initial_cost,
            rounds,
            centers,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct JsonHeader {
    initial_centers: Vec<Point>,
    #[serde(with = "hex_u64")]
    data_fingerprint: u64,
    selector: String,
}

#[derive(Serialize, Deserialize)]
struct JsonRecord {
    round: usize,
    #[serde(with = "finite_or_null")]
    cost: f64,
    center: Option<Point>,
    candidates: usize,
    skipped: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    zero_cost: bool,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_hex")]
    rng: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    candidate_set: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<ConditionCertificate>,
    #[serde(flatten)]
    header: Option<JsonHeader>,
}

mod opt_hex {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::hex_u64::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| u64::from_str_radix(&s, 16).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Winning candidate of one round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pick {
    pub index: usize,
    pub cost: f64,
    pub best_cost: f64,
}

/// Lowest-index candidate whose cost is within `(1+τ)` of the exact minimum
/// over `candidates`. With `τ = 0` this is the lowest-index exact argmin.
///
/// Candidate costs are evaluated in parallel; the reduction only looks at
/// the ordered cost vector, so the result does not depend on scheduling.
pub fn pick_candidate(cache: &NearestCache<'_>, candidates: &[Point], tau: f64) -> Result<Pick> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("tau = {tau} must be >= 0")));
    }
    cache.space().check_points(candidates)?;
    let costs: Vec<f64> = candidates
        .par_iter()
        .map(|c| cache.candidate_cost_unchecked(c))
        .collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let bound = (1.0 + tau) * best;
    let index = costs
        .iter()
        .position(|&c| c <= bound)
        .expect("the minimum itself qualifies");
    Ok(Pick {
        index,
        cost: costs[index],
        best_cost: best,
    })
}

/// Runs the greedy loop.
pub fn run_greedy(space: &PointSpace, points: &[Point], config: &GreedyConfig) -> Result<GreedyTrace> {
    run(space, points, config, None)
}

/// Runs the greedy loop and attaches a Condition 1 / Condition 2 certificate
/// against `reference` to every round.
pub fn run_greedy_certified(
    space: &PointSpace,
    points: &[Point],
    config: &GreedyConfig,
    reference: &ReferenceSolution,
    gamma: f64,
) -> Result<GreedyTrace> {
    run(space, points, config, Some((reference, gamma)))
}

fn run(
    space: &PointSpace,
    points: &[Point],
    config: &GreedyConfig,
    certify: Option<(&ReferenceSolution, f64)>,
) -> Result<GreedyTrace> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("greedy: no data points".into()));
    }
    if !(config.tau >= 0.0 && config.tau.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tau = {} must be >= 0",
            config.tau
        )));
    }
    let selector = Selector::new(config.selector.clone(), space, points)?;
    let mut cache = NearestCache::build(space, points, &config.initial_centers)?;
    let initial_cost = cache.total_cost().unwrap_or(f64::INFINITY);
    let base = RngStream::new(config.seed);
    let mut rounds = Vec::with_capacity(config.rounds);

    for round in 1..=config.rounds {
        let mut rng = base.child(round as u64);
        let rng_fingerprint = rng.key();
        let selection = selector
            .select(&cache, &mut rng)
            .map_err(|e| Error::Selector {
                round,
                source: Box::new(e),
            })?;
        let candidates = selection.candidates.as_ref();
        let certificate = match certify {
            Some((reference, gamma)) if !candidates.is_empty() => Some(certify_round(
                space,
                points,
                reference,
                &cache,
                candidates,
                gamma,
            )?),
            _ => None,
        };
        let candidate_set = config.record_candidates.then(|| candidates.to_vec());
        let prev_cost = cache.total_cost().unwrap_or(f64::INFINITY);

        if candidates.is_empty() {
            warn!("round {round}: selector returned no candidates, round skipped");
            rounds.push(RoundRecord {
                round,
                center: None,
                cost: prev_cost,
                candidates: 0,
                rng_fingerprint,
                skipped: true,
                zero_cost: selection.zero_cost,
                candidate_set,
                certificate,
            });
            continue;
        }

        let pick = pick_candidate(&cache, candidates, config.tau)?;
        let center = candidates[pick.index].clone();
        cache = cache.add_center(&center)?;
        rounds.push(RoundRecord {
            round,
            center: Some(center),
            cost: cache.total_cost().expect("nonempty after adding a center"),
            candidates: candidates.len(),
            rng_fingerprint,
            skipped: false,
            zero_cost: selection.zero_cost,
            candidate_set,
            certificate,
        });
    }

    Ok(GreedyTrace {
        data_fingerprint: data_fingerprint(points),
        selector: config.selector.name().to_string(),
        initial_centers: config.initial_centers.clone(),
        initial_cost,
        rounds,
        centers: cache.centers().to_vec(),
    })
}
