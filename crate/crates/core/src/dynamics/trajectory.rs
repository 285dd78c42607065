use std::io::Write;

use crate::dynamics::wall::Wall;
use crate::error::{Error, Result};

/// Jump history of labels `1..=n` over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub(crate) initial: Vec<i64>,
    pub(crate) jumps: Vec<Vec<f64>>,
    pub(crate) horizon: f64,
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn n_labels(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[i64] {
        &self.initial
    }

    /// Jump times of label `n` (1-based).
    pub fn jump_times(&self, n: usize) -> Result<&[f64]> {
        self.check_label(n)?;
        Ok(&self.jumps[n - 1])
    }

    fn check_label(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.initial.len() {
            return Err(Error::OutOfRange(format!(
                "label {n} outside 1..={}",
                self.initial.len()
            )));
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t.is_nan() || t < 0.0 || t > self.horizon {
            return Err(Error::OutOfRange(format!("time {t} outside [0, {}]", self.horizon)));
        }
        Ok(())
    }

    /// `x_n(t)`, counting a jump at exactly `t`.
    pub fn position_at(&self, n: usize, t: f64) -> Result<i64> {
        self.check_label(n)?;
        self.check_time(t)?;
        let k = self.jumps[n - 1].partition_point(|&s| s <= t);
        Ok(self.initial[n - 1] + k as i64)
    }

    /// `x_n(t-)`.
    pub fn left_limit(&self, n: usize, t: f64) -> Result<i64> {
        self.check_label(n)?;
        self.check_time(t)?;
        let k = self.jumps[n - 1].partition_point(|&s| s < t);
        Ok(self.initial[n - 1] + k as i64)
    }

    pub fn final_position(&self, n: usize) -> Result<i64> {
        self.check_label(n)?;
        Ok(self.initial[n - 1] + self.jumps[n - 1].len() as i64)
    }

    pub fn final_positions(&self) -> Vec<i64> {
        self.initial
            .iter()
            .zip(&self.jumps)
            .map(|(x, j)| x + j.len() as i64)
            .collect()
    }

    pub fn total_jumps(&self) -> usize {
        self.jumps.iter().map(Vec::len).sum()
    }

    /// Checks exclusion, time ordering and the right-wall bound on every jump.
    pub fn validate(&self, wall: &Wall) -> Result<()> {
        crate::dynamics::initial::check_decreasing(&self.initial)?;
        for (i, times) in self.jumps.iter().enumerate() {
            if times.windows(2).any(|w| w[1] <= w[0])
                || times.iter().any(|&t| t <= 0.0 || t > self.horizon)
            {
                return Err(Error::Precondition(format!("label {} has unordered jump times", i + 1)));
            }
            for (k, &t) in times.iter().enumerate() {
                let landed = self.initial[i] + k as i64 + 1;
                if i > 0 && self.position_at(i, t)? <= landed {
                    return Err(Error::Precondition(format!(
                        "exclusion violated by label {} at t = {t}",
                        i + 1
                    )));
                }
                if i == 0 {
                    if let Wall::Right(f) = wall {
                        if landed as f64 > f.eval(t)? {
                            return Err(Error::Precondition(format!(
                                "wall violated at t = {t}: x_1 = {landed}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// CSV with columns `label,jump_index,time,new_position`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "label,jump_index,time,new_position")?;
        for (i, times) in self.jumps.iter().enumerate() {
            for (k, t) in times.iter().enumerate() {
                writeln!(out, "{},{},{},{}", i + 1, k + 1, t, self.initial[i] + k as i64 + 1)?;
            }
        }
        Ok(())
    }
}
