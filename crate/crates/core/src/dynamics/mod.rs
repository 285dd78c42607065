//! Event-driven single-species TASEP with walls.

pub mod initial;
pub mod trajectory;
pub mod wall;

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

pub use initial::InitialCondition;
pub use trajectory::Trajectory;
pub use wall::{Knot, PiecewiseFn, Wall};

use crate::clockfield::ClockField;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Pending {
    t: f64,
    site: i64,
    label: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        self.t
            .total_cmp(&other.t)
            .then(self.site.cmp(&other.site))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Evaluates `f` at `t`, or `+∞` when there is no wall.
pub fn eval_wall(f: Option<&PiecewiseFn>, t: f64) -> Result<f64> {
    match f {
        Some(f) => f.eval(t),
        None => Wall::None.eval(t),
    }
}

/// Runs the TASEP from `positions` (rightmost first) up to `horizon`.
///
/// Each particle keeps at most one pending clock event: the next ring of the
/// site it occupies. Rings of empty sites never matter, so they are skipped,
/// and a particle blocked by its right neighbour sleeps until that neighbour
/// jumps, then resumes at the first ring of its site after that time.
pub fn simulate(
    positions: &[i64],
    wall: &Wall,
    horizon: f64,
    clocks: &mut ClockField,
) -> Result<Trajectory> {
    initial::check_decreasing(positions)?;
    if !(horizon >= 0.0 && horizon <= clocks.horizon()) {
        return Err(Error::Range {
            requested: horizon,
            horizon: clocks.horizon(),
        });
    }
    if let Wall::Right(f) = wall {
        if let Some(&x1) = positions.first() {
            if x1 as f64 > f.eval(0.0)? {
                return Err(Error::Precondition(format!("x_1(0) = {x1} exceeds the wall")));
            }
        }
    }
    if let Wall::MinSite { reflect, .. } = wall {
        if horizon > *reflect {
            return Err(Error::Precondition(format!(
                "site wall reflected at {reflect} cannot run to {horizon}"
            )));
        }
    }

    let n = positions.len();
    let mut pos = positions.to_vec();
    let mut jumps: Vec<Vec<f64>> = vec![Vec::new(); n];
    let mut asleep = vec![false; n];
    let mut heap = BinaryHeap::with_capacity(n);
    for (label, &z) in pos.iter().enumerate() {
        if let Some(t) = clocks.next_event(z, 0.0)? {
            heap.push(Reverse(Pending { t, site: z, label }));
        }
    }
    while let Some(Reverse(ev)) = heap.pop() {
        if ev.t > horizon {
            break;
        }
        let i = ev.label;
        let z = ev.site;
        if i > 0 && pos[i - 1] == z + 1 {
            asleep[i] = true;
            continue;
        }
        let next_site = if wall.admits(i + 1, z, ev.t) {
            pos[i] = z + 1;
            jumps[i].push(ev.t);
            if i + 1 < n && asleep[i + 1] {
                asleep[i + 1] = false;
                if let Some(t) = clocks.next_event(z - 1, ev.t)? {
                    heap.push(Reverse(Pending {
                        t,
                        site: z - 1,
                        label: i + 1,
                    }));
                }
            }
            z + 1
        } else {
            z
        };
        if let Some(t) = clocks.next_event(next_site, ev.t)? {
            heap.push(Reverse(Pending {
                t,
                site: next_site,
                label: i,
            }));
        }
    }
    Ok(Trajectory {
        initial: positions.to_vec(),
        jumps,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_wall_freezes_first_particle() {
        let mut clocks = ClockField::new(8, 5.0).unwrap();
        let wall = Wall::right(PiecewiseFn::zero()).unwrap();
        let traj = simulate(&[0, -1, -2, -3], &wall, 5.0, &mut clocks).unwrap();
        assert!(traj.jump_times(1).unwrap().is_empty());
        traj.validate(&wall).unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        let mut clocks = ClockField::new(8, 5.0).unwrap();
        assert!(simulate(&[0, 0], &Wall::None, 1.0, &mut clocks).is_err());
        assert!(simulate(&[0], &Wall::None, 6.0, &mut clocks).is_err());
        let wall = Wall::right(PiecewiseFn::zero()).unwrap();
        assert!(simulate(&[1, 0], &wall, 1.0, &mut clocks).is_err());
    }

    #[test]
    fn first_particle_follows_its_site_clocks() {
        // an unblocked, unwalled particle jumps at the first ring of each site it visits
        let mut clocks = ClockField::new(21, 3.0).unwrap();
        let traj = simulate(&[0], &Wall::None, 3.0, &mut clocks).unwrap();
        let mut t = 0.0;
        let mut z = 0;
        let mut expect = Vec::new();
        while let Some(next) = clocks.next_event(z, t).unwrap() {
            expect.push(next);
            t = next;
            z += 1;
        }
        assert_eq!(traj.jump_times(1).unwrap(), &expect[..]);
    }

    #[test]
    fn position_queries() {
        let traj = Trajectory {
            initial: vec![0, -1],
            jumps: vec![vec![0.5, 0.8], vec![0.9]],
            horizon: 1.0,
        };
        assert_eq!(traj.position_at(1, 0.0).unwrap(), 0);
        assert_eq!(traj.position_at(1, 0.5).unwrap(), 1);
        assert_eq!(traj.left_limit(1, 0.5).unwrap(), 0);
        assert_eq!(traj.position_at(1, 0.6).unwrap(), 1);
        assert_eq!(traj.position_at(1, 1.0).unwrap(), 2);
        assert_eq!(traj.final_positions(), vec![2, 0]);
        assert!(traj.position_at(3, 0.1).is_err());
        assert!(traj.position_at(1, 1.5).is_err());
        traj.validate(&Wall::None).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "label,jump_index,time,new_position\n1,1,0.5,1\n1,2,0.8,2\n2,1,0.9,0\n"
        );
    }

    #[test]
    fn validate_catches_exclusion_breach() {
        let traj = Trajectory {
            initial: vec![0, -1],
            jumps: vec![vec![0.9], vec![0.5]],
            horizon: 1.0,
        };
        assert!(traj.validate(&Wall::None).is_err());
    }
}
