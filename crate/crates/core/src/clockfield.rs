//! Per-site rate-1 Poisson clocks shared by coupled processes.
//!
//! Every site `z` owns an independent ChaCha8 stream selected by
//! `(seed, z)`: the key comes from the seed and the 64-bit stream id is the
//! site index. Time is cut into blocks `[kL, (k+1)L)` of length `L = 16`; block `k` of a site
//! reads its exponential gaps from a fixed word offset of the site stream, so
//! blocks are generated independently and only when asked for. The events of
//! a site therefore do not depend on query order, on which other sites were
//! touched, or on how many processes read the field. Driving several TASEPs
//! with one field is exactly the basic coupling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{Error, Result};

/// Time units per block.
const BLOCK_LEN: f64 = 16.0;
/// 32-bit words reserved per block. A block consumes about seventy.
const BLOCK_WORDS: u128 = 1 << 14;

/// Deterministic, lazily generated family of Poisson clocks indexed by site.
#[derive(Debug, Clone)]
pub struct ClockField {
    seed: u64,
    horizon: f64,
    key: [u8; 32],
    table: SiteTable,
}

#[derive(Debug, Clone)]
struct SiteStream {
    rng: ChaCha8Rng,
    // blocks lo..hi are generated; events holds their arrivals in order
    lo: u64,
    hi: u64,
    events: Vec<f64>,
}

impl SiteStream {
    fn new(key: [u8; 32], site: i64) -> Self {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(site as u64);
        Self {
            rng,
            lo: 0,
            hi: 0,
            events: Vec::new(),
        }
    }

    fn generate(&mut self, k: u64, horizon: f64, out: &mut Vec<f64>) {
        self.rng.set_word_pos(k as u128 * BLOCK_WORDS);
        let start = k as f64 * BLOCK_LEN;
        let mut u = 0.0f64;
        loop {
            let gap: f64 = self.rng.sample(Exp1);
            let next = u + gap;
            u = if next > u { next } else { u.next_up() };
            let t = start + u;
            if u >= BLOCK_LEN || t > horizon {
                break;
            }
            out.push(t);
        }
    }

    /// Makes blocks `a..b` available.
    fn cover(&mut self, a: u64, b: u64, horizon: f64) {
        if self.lo <= a && b <= self.hi {
            return;
        }
        if self.lo == self.hi {
            self.lo = a;
            self.hi = a;
        }
        if a < self.lo {
            let mut front = Vec::new();
            for k in a..self.lo {
                self.generate(k, horizon, &mut front);
            }
            front.extend_from_slice(&self.events);
            self.events = front;
            self.lo = a;
        }
        let mut tail = std::mem::take(&mut self.events);
        for k in self.hi..b {
            self.generate(k, horizon, &mut tail);
        }
        self.events = tail;
        self.hi = self.hi.max(b);
    }
}

fn block_of(t: f64) -> u64 {
    (t / BLOCK_LEN).floor() as u64
}

/// Dense site-indexed storage that grows in both directions.
#[derive(Debug, Clone, Default)]
struct SiteTable {
    base: i64,
    slots: Vec<Option<SiteStream>>,
}

impl SiteTable {
    fn get_or_insert(&mut self, site: i64, key: [u8; 32]) -> &mut SiteStream {
        if self.slots.is_empty() {
            self.base = site;
        }
        if site < self.base {
            let grow = (self.base - site) as usize;
            let mut fresh: Vec<Option<SiteStream>> = Vec::with_capacity(grow + self.slots.len());
            fresh.resize_with(grow, || None);
            fresh.append(&mut self.slots);
            self.slots = fresh;
            self.base = site;
        }
        let idx = (site - self.base) as usize;
        if idx >= self.slots.len() {
            self.slots.resize_with(idx + 1, || None);
        }
        self.slots[idx].get_or_insert_with(|| SiteStream::new(key, site))
    }

    fn materialized(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }
}

impl ClockField {
    pub fn new(seed: u64, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(Error::Domain(format!("clock horizon must be finite and >= 0, got {horizon}")));
        }
        let key = ChaCha8Rng::seed_from_u64(seed).get_seed();
        Ok(Self {
            seed,
            horizon,
            key,
            table: SiteTable::default(),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of sites whose stream has been touched so far.
    pub fn materialized_sites(&self) -> usize {
        self.table.materialized()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 || t > self.horizon {
            return Err(Error::Range {
                requested: t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }

    /// All events of site `z` in `[0, up_to]`, ascending.
    pub fn site_events(&mut self, z: i64, up_to: f64) -> Result<&[f64]> {
        self.check_time(up_to)?;
        let horizon = self.horizon;
        let stream = self.table.get_or_insert(z, self.key);
        stream.cover(0, block_of(up_to) + 1, horizon);
        let end = stream.events.partition_point(|&e| e <= up_to);
        Ok(&stream.events[..end])
    }

    /// First event of site `z` strictly after `after`, if one occurs before the horizon.
    pub fn next_event(&mut self, z: i64, after: f64) -> Result<Option<f64>> {
        self.check_time(after)?;
        let horizon = self.horizon;
        let last = block_of(horizon);
        let stream = self.table.get_or_insert(z, self.key);
        let first = block_of(after);
        stream.cover(first, first + 1, horizon);
        loop {
            let idx = stream.events.partition_point(|&e| e <= after);
            if let Some(&t) = stream.events.get(idx) {
                return Ok(Some(t));
            }
            if stream.hi > last {
                return Ok(None);
            }
            let next = stream.hi + 1;
            stream.cover(first, next, horizon);
        }
    }
}

/// SplitMix64 finalizer; used to spread replica and stream tags over the seed space.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replica `index` of an experiment stream `tag` under `base`.
///
/// Distinct tags give unrelated seed sequences, which keeps e.g. the two sides
/// of a distributional identity on independent randomness.
pub fn replica_seed(base: u64, tag: u64, index: u64) -> u64 {
    mix64(mix64(base ^ mix64(tag)).wrapping_add(index))
}
