//! Transient law of small TASEPs from the master equation, by uniformization.
//!
//! Shares no code with the simulator: states are explicit position vectors,
//! the wall is re-evaluated from its raw breakpoints, and time is split at every
//! instant where the integer part of the wall can change.

use std::collections::{HashMap, VecDeque};

/// Nondecreasing piecewise-linear càdlàg wall given by `(t, left value, jump)`
/// triples; constant after the last one.
#[derive(Debug, Clone)]
pub struct RawWall(pub Vec<(f64, f64, f64)>);

impl RawWall {
    pub fn value(&self, t: f64) -> f64 {
        let k = self.0.iter().rposition(|p| p.0 <= t).expect("t >= 0");
        let (tk, left, jump) = self.0[k];
        let v = left + jump;
        match self.0.get(k + 1) {
            Some(&(tn, ln, _)) if t > tk => v + (t - tk) / (tn - tk) * (ln - v),
            _ => v,
        }
    }

    /// Times in `(0, horizon)` where `floor(f)` can change.
    pub fn floor_changes(&self, horizon: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for (k, &(tk, left, jump)) in self.0.iter().enumerate() {
            out.push(tk);
            if let Some(&(tn, ln, _)) = self.0.get(k + 1) {
                let v = left + jump;
                let mut m = v.floor() + 1.0;
                while m <= ln {
                    out.push(tk + (m - v) / (ln - v) * (tn - tk));
                    m += 1.0;
                }
            }
        }
        out.retain(|&t| t > 0.0 && t < horizon);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `[a, b)` pieces of `[0, horizon]` on which `floor(f)` is constant, with that value.
    fn pieces(&self, horizon: f64) -> Vec<(f64, f64, i64)> {
        let mut cuts = vec![0.0];
        cuts.extend(self.floor_changes(horizon));
        cuts.push(horizon);
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| (w[0], w[1], self.value(0.5 * (w[0] + w[1])).floor() as i64))
            .collect()
    }
}

/// Probability with an absolute error bound.
#[derive(Debug, Clone, Copy)]
pub struct Exact {
    pub prob: f64,
    pub error: f64,
}

struct Space {
    states: Vec<Vec<i64>>,
}

impl Space {
    /// Configurations reachable from `start` with particle 1 at most at `top`.
    fn explore(start: &[i64], top: i64) -> (Self, HashMap<Vec<i64>, usize>) {
        let mut index = HashMap::new();
        let mut states = Vec::new();
        let mut queue = VecDeque::new();
        index.insert(start.to_vec(), 0);
        states.push(start.to_vec());
        queue.push_back(start.to_vec());
        while let Some(x) = queue.pop_front() {
            for i in 0..x.len() {
                let target = x[i] + 1;
                let free = if i == 0 { target <= top } else { x[i - 1] != target };
                if free {
                    let mut y = x.clone();
                    y[i] = target;
                    if !index.contains_key(&y) {
                        index.insert(y.clone(), states.len());
                        states.push(y.clone());
                        queue.push_back(y);
                    }
                }
            }
        }
        (Self { states }, index)
    }
}

/// Moves `p` forward by `h` with particle 1 held at or below `cap`; jumps of
/// particle 1 past `trunc` leave the state space. Returns the error bound added.
fn evolve(
    space: &Space,
    index: &HashMap<Vec<i64>, usize>,
    p: &mut Vec<f64>,
    h: f64,
    cap: i64,
    trunc: i64,
) -> f64 {
    let n = space.states[0].len();
    let rate = n as f64;
    // None = lost through the truncation
    let moves: Vec<Vec<Option<usize>>> = space
        .states
        .iter()
        .map(|x| {
            let mut out = Vec::new();
            for i in 0..n {
                let target = x[i] + 1;
                if i > 0 && x[i - 1] == target {
                    continue;
                }
                if i == 0 && target > cap {
                    continue;
                }
                if i == 0 && target > trunc {
                    out.push(None);
                    continue;
                }
                let mut y = x.clone();
                y[i] = target;
                out.push(Some(index[&y]));
            }
            out
        })
        .collect();
    let mass_before: f64 = p.iter().sum();
    let lam = rate * h;
    let mut weight = (-lam).exp();
    let mut cumulative = weight;
    let mut term = p.clone();
    let mut acc: Vec<f64> = term.iter().map(|v| v * weight).collect();
    let mut k = 0u32;
    while 1.0 - cumulative > 1e-15 && (k as f64) < lam + 200.0 {
        let mut next = vec![0.0; term.len()];
        for (s, mv) in moves.iter().enumerate() {
            let v = term[s];
            if v == 0.0 {
                continue;
            }
            next[s] += v * (1.0 - mv.len() as f64 / rate);
            for t in mv.iter().flatten() {
                next[*t] += v / rate;
            }
        }
        term = next;
        k += 1;
        weight *= lam / k as f64;
        cumulative += weight;
        for (a, v) in acc.iter_mut().zip(&term) {
            *a += v * weight;
        }
    }
    *p = acc;
    let tail = (1.0 - cumulative).max(0.0) * mass_before;
    let lost = (mass_before - p.iter().sum::<f64>() - tail).max(0.0);
    tail + lost + 1e-13
}

/// Room for particle 1 to move in time `horizon` with truncation error far below `1e-12`.
fn free_room(horizon: f64) -> i64 {
    (40.0 + 6.0 * horizon) as i64
}

/// `P(x_n(T) > s)` for each `s`, TASEP from `ic[..n]` with particle 1 kept at or
/// below `wall` (none: free).
pub fn wall_tasep_survival(
    ic: &[i64],
    wall: Option<&RawWall>,
    n: usize,
    horizon: f64,
    s: &[i64],
) -> Vec<Exact> {
    let start = &ic[..n];
    let (pieces, top) = match wall {
        Some(w) => (w.pieces(horizon), w.value(horizon).floor() as i64),
        None => (vec![(0.0, horizon, i64::MAX)], start[0] + free_room(horizon)),
    };
    let (space, index) = Space::explore(start, top);
    let mut p = vec![0.0; space.states.len()];
    p[0] = 1.0;
    let mut error = 0.0;
    for (a, b, cap) in pieces {
        error += evolve(&space, &index, &mut p, b - a, cap, top);
    }
    s.iter()
        .map(|&level| Exact {
            prob: space
                .states
                .iter()
                .zip(&p)
                .filter(|(x, _)| x[n - 1] > level)
                .map(|(_, v)| v)
                .sum(),
            error,
        })
        .collect()
}

/// Probability that step TASEP with `n` particles satisfies
/// `x_n(t) ≥ s + 1 - f(T - t)` on `[0, T]` and `x_{n-j}(T) > s - ic_j` for all `j < n`.
///
/// The path constraint is imposed by killing: on each piece where `floor(f(T - t))`
/// is constant the threshold is constant and `x_n` only grows, so checking at the
/// start of the piece and at `T` suffices.
pub fn step_event_probability(
    ic: &[i64],
    wall: Option<&RawWall>,
    n: usize,
    horizon: f64,
    s: i64,
) -> Exact {
    let start: Vec<i64> = (0..n as i64).map(|k| -k).collect();
    let trunc = free_room(horizon);
    let (space, index) = Space::explore(&start, trunc);
    let mut p = vec![0.0; space.states.len()];
    p[0] = 1.0;
    let mut error = 0.0;
    let mut pieces: Vec<(f64, f64, Option<i64>)> = match wall {
        Some(w) => w
            .pieces(horizon)
            .into_iter()
            .rev()
            .map(|(a, b, level)| (horizon - b, horizon - a, Some(level)))
            .collect(),
        None => vec![(0.0, horizon, None)],
    };
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0));
    let kill = |p: &mut Vec<f64>, floor_f: i64| {
        for (x, v) in space.states.iter().zip(p.iter_mut()) {
            if x[n - 1] < s + 1 - floor_f {
                *v = 0.0;
            }
        }
    };
    for (a, b, level) in pieces {
        if let Some(level) = level {
            kill(&mut p, level);
        }
        error += evolve(&space, &index, &mut p, b - a, i64::MAX, trunc);
    }
    if let Some(w) = wall {
        kill(&mut p, w.value(0.0).floor() as i64);
    }
    let prob = space
        .states
        .iter()
        .zip(&p)
        .filter(|(x, _)| (0..n).all(|j| x[n - 1 - j] > s - ic[j]))
        .map(|(_, v)| v)
        .sum();
    Exact { prob, error }
}
