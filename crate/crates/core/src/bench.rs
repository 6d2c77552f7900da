//! Synthetic workloads and throughput/latency measurement for generate,
//! verify and chain linking.
//!
//! Measurements report relative properties (per-thread scaling, latency
//! independence from payload size); absolute numbers depend on the host.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, RngCore, SeedableRng};
use rayon::prelude::*;

use crate::encoding::{Event, Extension};
use crate::error::{Error, Result};
use crate::evidence::{generate_evidence, verify_evidence, Parallelism};
use crate::hash::{hash_parts, Digest, HashCounter};
use crate::item::SignedEvidence;
use crate::keys::KeyPair;
use crate::link::chain::{extend_chain, ChainTip};
use crate::params::Params;

/// Random events whose first input reference commits to a payload of a
/// chosen size. The payload is hashed once per event when it is built.
pub struct SyntheticWorkload {
    rng: StdRng,
    payload: Vec<u8>,
    next: u64,
}

impl SyntheticWorkload {
    pub fn new(seed: u64, payload_bytes: usize) -> Self {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut payload = vec![0u8; payload_bytes];
        rng.fill_bytes(&mut payload);
        SyntheticWorkload {
            rng,
            payload,
            next: 0,
        }
    }

    pub fn payload_len(&self) -> usize {
        self.payload.len()
    }

    fn digest(&mut self) -> Digest {
        let mut d = [0u8; 32];
        self.rng.fill_bytes(&mut d);
        Digest(d)
    }

    pub fn next_event(&mut self) -> Event {
        let seq = self.next;
        self.next += 1;
        let input = hash_parts(&[&seq.to_be_bytes(), &self.payload]);
        let n_inputs = self.rng.gen_range(0..4);
        let mut input_refs = vec![input];
        input_refs.extend((0..n_inputs).map(|_| self.digest()));
        let n_outputs = self.rng.gen_range(1..3);
        let output_refs = (0..n_outputs).map(|_| self.digest()).collect();
        Event {
            event_id: format!("evt-{seq:010}").into_bytes(),
            workflow_id: format!("wf-{}", self.rng.gen_range(0..16)).into_bytes(),
            actor: format!("actor-{}", self.rng.gen_range(0..100)),
            timestamp: 1_700_000_000_000_000 + seq * 1_000,
            config_digest: self.digest(),
            input_refs,
            output_refs,
            env_digest: self.digest(),
            prev_link: if seq == 0 {
                Digest::ZERO
            } else {
                self.digest()
            },
            extensions: vec![Extension {
                tag: "step".to_string(),
                value: seq.to_be_bytes().to_vec(),
            }],
        }
    }

    pub fn events(&mut self, n: usize) -> Vec<Event> {
        (0..n).map(|_| self.next_event()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    Generate,
    Verify,
    Link,
}

impl FromStr for BenchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generate" => Ok(BenchMode::Generate),
            "verify" => Ok(BenchMode::Verify),
            "link" => Ok(BenchMode::Link),
            other => Err(Error::decode("bench mode", other.to_string())),
        }
    }
}

impl fmt::Display for BenchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchMode::Generate => "generate",
            BenchMode::Verify => "verify",
            BenchMode::Link => "link",
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BenchConfig {
    pub mode: BenchMode,
    pub events: usize,
    pub threads: usize,
    pub payload_bytes: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub mode: BenchMode,
    pub events: usize,
    pub threads: usize,
    pub payload_bytes: usize,
    pub elapsed: Duration,
    pub events_per_sec: f64,
    pub mean_latency_us: f64,
    pub p99_latency_us: f64,
    /// Suite-hash evaluations for one operation on one event.
    pub hash_calls_per_event: u64,
    pub item_bytes: usize,
    pub record_bytes: usize,
}

impl BenchReport {
    /// `key=value` pairs on one line.
    pub fn to_line(&self) -> String {
        format!(
            "bench mode={} events={} threads={} payload_bytes={} elapsed_s={:.6} events_per_s={:.1} mean_latency_us={:.3} p99_latency_us={:.3} hash_calls_per_event={} item_bytes={} record_bytes={}",
            self.mode,
            self.events,
            self.threads,
            self.payload_bytes,
            self.elapsed.as_secs_f64(),
            self.events_per_sec,
            self.mean_latency_us,
            self.p99_latency_us,
            self.hash_calls_per_event,
            self.item_bytes,
            self.record_bytes
        )
    }
}

fn timed<T>(op: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = op();
    (out, t.elapsed())
}

/// Runs `op` over `0..n` on `threads` workers; returns per-item latencies
/// and wall time.
fn measure<F>(n: usize, threads: usize, op: F) -> Result<(Vec<Duration>, Duration)>
where
    F: Fn(usize) + Sync + Send,
{
    Parallelism::Threads(threads).install(|| {
        timed(|| {
            if threads == 1 {
                (0..n).map(|i| timed(|| op(i)).1).collect()
            } else {
                (0..n).into_par_iter().map(|i| timed(|| op(i)).1).collect()
            }
        })
    })
}

fn summarize(
    config: &BenchConfig,
    params: &Params,
    threads: usize,
    mut lat: Vec<Duration>,
    wall: Duration,
    hash_calls_per_event: u64,
) -> BenchReport {
    lat.sort_unstable();
    let n = lat.len().max(1);
    let mean = lat.iter().map(Duration::as_secs_f64).sum::<f64>() / n as f64;
    let p99 = lat
        .get(((n as f64 * 0.99).ceil() as usize).saturating_sub(1))
        .copied()
        .unwrap_or_default();
    BenchReport {
        mode: config.mode,
        events: lat.len(),
        threads,
        payload_bytes: config.payload_bytes,
        elapsed: wall,
        events_per_sec: lat.len() as f64 / wall.as_secs_f64().max(1e-9),
        mean_latency_us: mean * 1e6,
        p99_latency_us: p99.as_secs_f64() * 1e6,
        hash_calls_per_event,
        item_bytes: params.item_size(),
        record_bytes: params.record_size(),
    }
}

/// Prepares a synthetic workload (untimed), then times the selected
/// operation over every event.
pub fn run_bench(params: &Params, keypair: &KeyPair, config: &BenchConfig) -> Result<BenchReport> {
    if config.events == 0 {
        return Err(Error::EmptySequence);
    }
    let threads = config.threads.max(1);
    let events = SyntheticWorkload::new(config.seed, config.payload_bytes).events(config.events);
    match config.mode {
        BenchMode::Generate => {
            let c = HashCounter::start();
            generate_evidence(params, keypair, &events[0])?;
            let per = c.count();
            let (lat, wall) = measure(events.len(), threads, |i| {
                let s =
                    generate_evidence(params, keypair, &events[i]).expect("valid synthetic event");
                std::hint::black_box(s);
            })?;
            Ok(summarize(config, params, threads, lat, wall, per))
        }
        BenchMode::Verify => {
            let signed: Vec<SignedEvidence> = events
                .iter()
                .map(|e| generate_evidence(params, keypair, e))
                .collect::<Result<_>>()?;
            let pk = keypair.public_key();
            let c = HashCounter::start();
            verify_evidence(params, pk, &events[0], &signed[0]);
            let per = c.count();
            let (lat, wall) = measure(events.len(), threads, |i| {
                let o = verify_evidence(params, pk, &events[i], &signed[i]);
                debug_assert!(o.is_accept());
                std::hint::black_box(o);
            })?;
            Ok(summarize(config, params, threads, lat, wall, per))
        }
        BenchMode::Link => {
            let items: Vec<_> = events
                .iter()
                .map(|e| generate_evidence(params, keypair, e).map(|s| s.item))
                .collect::<Result<_>>()?;
            let mut lat = Vec::with_capacity(items.len());
            let c = HashCounter::start();
            let (_, wall) = timed(|| -> Result<ChainTip> {
                let mut tip = ChainTip::EMPTY;
                for it in &items {
                    let t = Instant::now();
                    tip = extend_chain(params, tip, it)?;
                    lat.push(t.elapsed());
                }
                Ok(tip)
            });
            let per = c.count() / items.len() as u64;
            Ok(summarize(config, params, 1, lat, wall, per))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workload_is_reproducible_and_valid() {
        let a = SyntheticWorkload::new(3, 100).events(20);
        let b = SyntheticWorkload::new(3, 100).events(20);
        assert_eq!(a, b);
        for e in &a {
            e.validate().unwrap();
        }
    }

    #[test]
    fn reports_k_hashes_per_event() {
        let p = Params::with_default_roles(8).unwrap();
        let kp = KeyPair::from_seed(&[1; 32]);
        for mode in [BenchMode::Generate, BenchMode::Verify, BenchMode::Link] {
            let r = run_bench(
                &p,
                &kp,
                &BenchConfig {
                    mode,
                    events: 50,
                    threads: 2,
                    payload_bytes: 10,
                    seed: 1,
                },
            )
            .unwrap();
            let want = if mode == BenchMode::Link { 1 } else { 8 };
            assert_eq!(r.hash_calls_per_event, want);
            assert_eq!(r.events, 50);
            assert_eq!(r.record_bytes, 352);
            assert!(r.to_line().starts_with("bench mode="));
        }
    }
}
