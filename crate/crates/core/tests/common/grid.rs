//! Small wall / initial-data configurations shared by the oracle and acceptance tests.

use excluwall::dynamics::{InitialCondition, PiecewiseFn};

use super::master_equation::RawWall;

#[derive(Debug, Clone)]
pub struct Case {
    pub label: String,
    pub ic: InitialCondition,
    pub positions: Vec<i64>,
    pub wall: RawWall,
    pub n: usize,
    pub horizon: f64,
    pub s: Vec<i64>,
}

impl Case {
    pub fn wall_fn(&self) -> PiecewiseFn {
        PiecewiseFn::from_triples(&self.wall.0).unwrap()
    }
}

pub fn walls() -> Vec<(&'static str, RawWall)> {
    vec![
        ("zero", RawWall(vec![(0.0, 0.0, 0.0)])),
        (
            "kinked",
            RawWall(vec![(0.0, 0.0, 0.0), (1.0, 1.5, 0.0), (4.0, 2.25, 0.0)]),
        ),
        ("staircase", RawWall(vec![(0.0, 0.0, 0.0), (0.7, 0.0, 1.5)])),
    ]
}

pub fn initial_conditions() -> Vec<(&'static str, InitialCondition)> {
    vec![
        ("step", InitialCondition::step()),
        ("periodic2", InitialCondition::HalfPeriodic { d: 2.0 }),
        (
            "explicit",
            InitialCondition::Explicit {
                positions: vec![0, -2, -5],
            },
        ),
    ]
}

pub const HORIZONS: [f64; 3] = [1.0, 2.0, 4.0];

fn case(wall: usize, ic: usize, t: usize, n: usize) -> Case {
    let (wname, w) = walls().swap_remove(wall);
    let (iname, init) = initial_conditions().swap_remove(ic);
    let positions = init.materialize(3, 0).unwrap();
    let un = positions[n - 1];
    Case {
        label: format!("{wname}/{iname}/n={n}/T={}", HORIZONS[t]),
        ic: init,
        positions,
        wall: w,
        n,
        horizon: HORIZONS[t],
        s: (un - 1..=un + 2).collect(),
    }
}

/// Every wall, initial condition, horizon and label.
pub fn full_grid() -> Vec<Case> {
    let mut out = Vec::new();
    for w in 0..3 {
        for i in 0..3 {
            for t in 0..3 {
                for n in 1..=3 {
                    out.push(case(w, i, t, n));
                }
            }
        }
    }
    out
}

/// Every wall, initial condition and horizon, with the label cycling so each
/// `n` meets each wall and each initial condition three times.
pub fn latin_grid() -> Vec<Case> {
    let mut out = Vec::new();
    for w in 0..3 {
        for i in 0..3 {
            for t in 0..3 {
                out.push(case(w, i, t, 1 + (w + i + t) % 3));
            }
        }
    }
    out
}
