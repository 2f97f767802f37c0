//! Straight-line trajectory oracle for a single recipe running alone.
//!
//! Written from the plant equations and the scan timing rules, without
//! touching the runtime:
//! * a command issued in the PlantController slice of cycle `c` first acts
//!   in cycle `c + 1`, and the step at the end of cycle `c` runs with that
//!   silo idle;
//! * a level or temperature condition is seen at READ, i.e. on the state
//!   left by the previous cycle's step, and the completion (and the next
//!   stage) lands in that same cycle;
//! * MIX keeps the mixer on for `ceil(duration / period)` slices and
//!   reports in the slice after;
//! * a dwell of `n` slices entered at `c` ends at `c + n`;
//! * an uncontended resource is granted in the slice that asks for it.

use liqueur_plant::plant::{PlantConfig, SiloId};
use liqueur_plant::service::SystemConfig;

#[derive(Debug, Clone, Copy)]
enum Stage {
    Fill(SiloId),
    Dwell,
    Heat(SiloId),
    Transfer(SiloId, SiloId),
    Mix(SiloId),
    Empty(SiloId),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Tank {
    level: f64,
    temp: f64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Valves {
    fill: Option<usize>,
    drain: Option<usize>,
    heat: Option<usize>,
}

struct Physics<'a> {
    plant: &'a PlantConfig,
    dt: f64,
    tanks: Vec<Tank>,
}

impl Physics<'_> {
    fn step(&mut self, v: Valves) {
        let old = self.tanks.clone();
        let mut inflow = vec![(0.0, 0.0); old.len()];
        let mut outflow = vec![0.0; old.len()];
        let spec = |i: usize| &self.plant.silos[i];
        match (v.drain, v.fill) {
            (Some(s), Some(d)) => {
                let room = spec(d).capacity - old[d].level;
                let amount = (spec(s).drain_rate.min(spec(d).fill_rate) * self.dt)
                    .min(old[s].level)
                    .min(room);
                outflow[s] = amount;
                inflow[d] = (amount, old[s].temp);
            }
            (None, Some(d)) => {
                let room = spec(d).capacity - old[d].level;
                inflow[d] = ((spec(d).fill_rate * self.dt).min(room), self.plant.supply_temp);
            }
            (Some(s), None) => outflow[s] = (spec(s).drain_rate * self.dt).min(old[s].level),
            (None, None) => {}
        }
        for (i, tank) in self.tanks.iter_mut().enumerate() {
            let s = spec(i);
            let resident = old[i].level - outflow[i];
            let (amount, t_in) = inflow[i];
            tank.level = resident + amount;
            let mixed = if amount > 0.0 {
                (resident * old[i].temp + amount * t_in) / tank.level
            } else {
                old[i].temp
            };
            let heating = if v.heat == Some(i) && old[i].level > self.plant.dry_level {
                s.heat_rate * self.dt
            } else {
                0.0
            };
            tank.temp = mixed + heating + (s.ambient_temp - mixed) * self.dt / s.cooling_time_constant;
        }
    }

    fn full(&self, i: usize) -> bool {
        self.tanks[i].level >= self.plant.silos[i].high_threshold
    }

    fn empty(&self, i: usize) -> bool {
        self.tanks[i].level <= self.plant.silos[i].low_threshold
    }

    /// Idle step in the issuing cycle, then active steps until `done`
    /// holds at READ. Returns the completion cycle.
    fn run_until(&mut self, c: u64, v: Valves, done: impl Fn(&Self) -> bool) -> u64 {
        self.step(Valves::default());
        let mut t = c + 1;
        while !done(self) {
            self.step(v);
            t += 1;
            assert!(t < c + 100_000, "oracle stage does not terminate");
        }
        t
    }
}

/// Expected `(cycle, state)` entries of a lone run started at cycle 0,
/// without the zero-length WAIT_* states, ending with DONE; plus the final
/// silo levels.
pub struct Trajectory {
    pub states: Vec<(u64, String)>,
    pub final_levels: Vec<f64>,
}

impl Trajectory {
    pub fn done_cycle(&self) -> u64 {
        self.states.last().expect("non-empty").0
    }
}

pub fn lone_run(config: &SystemConfig, recipe: char) -> Trajectory {
    let (s1, s2, s3, s4) = (SiloId::S1, SiloId::S2, SiloId::S3, SiloId::S4);
    let (stages, params) = match recipe {
        'A' => (
            vec![
                Stage::Fill(s1),
                Stage::Dwell,
                Stage::Transfer(s1, s4),
                Stage::Heat(s4),
                Stage::Mix(s4),
                Stage::Empty(s4),
            ],
            config.recipes.a,
        ),
        'B' => (
            vec![
                Stage::Fill(s2),
                Stage::Heat(s2),
                Stage::Transfer(s2, s3),
                Stage::Mix(s3),
                Stage::Empty(s3),
            ],
            config.recipes.b,
        ),
        other => panic!("unknown recipe {other}"),
    };
    let period_ms = config.cycle.period_ms;
    let slices = |seconds: f64| ((seconds * 1000.0).round() as u64).div_ceil(period_ms);
    let mut phys = Physics {
        plant: &config.plant,
        dt: period_ms as f64 / 1000.0,
        tanks: config
            .plant
            .silos
            .iter()
            .map(|s| Tank { level: 0.0, temp: s.ambient_temp })
            .collect(),
    };
    let mut c = 0;
    let mut states = Vec::new();
    for stage in stages {
        let (name, next) = match stage {
            Stage::Fill(s) => {
                let i = s.index();
                let v = Valves { fill: Some(i), ..Valves::default() };
                (format!("FILLING_{s}"), phys.run_until(c, v, |p| p.full(i)))
            }
            Stage::Empty(s) => {
                let i = s.index();
                let v = Valves { drain: Some(i), ..Valves::default() };
                (format!("EMPTYING_{s}"), phys.run_until(c, v, |p| p.empty(i)))
            }
            Stage::Transfer(from, to) => {
                let (a, b) = (from.index(), to.index());
                let v = Valves { drain: Some(a), fill: Some(b), heat: None };
                let end = phys.run_until(c, v, |p| p.empty(a) || p.full(b));
                ("TRANSFERRING".to_string(), end)
            }
            Stage::Heat(s) => {
                let i = s.index();
                let v = Valves { heat: Some(i), ..Valves::default() };
                let end = phys.run_until(c, v, |p| p.tanks[i].temp >= params.setpoint);
                (format!("HEATING_{s}"), end)
            }
            Stage::Mix(s) => {
                let n = slices(params.mix_duration);
                for _ in 0..=n {
                    phys.step(Valves::default());
                }
                (format!("MIXING_{s}"), c + n + 1)
            }
            Stage::Dwell => {
                let n = slices(params.dwell_s1);
                for _ in 0..n {
                    phys.step(Valves::default());
                }
                ("DWELLING_S1".to_string(), c + n)
            }
        };
        states.push((c, name));
        c = next;
    }
    states.push((c, "DONE".to_string()));
    Trajectory {
        states,
        final_levels: phys.tanks.iter().map(|t| t.level).collect(),
    }
}
