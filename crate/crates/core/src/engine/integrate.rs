use super::output::{EnergyAudit, MachineAudit, TimeSeriesOutput};
use super::scenario::Scenario;
use super::system::{flow, Eval, Simulation, SIGNALS, SIG_RESIDUAL};
use crate::{Error, Result};

/// Result of one integrated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub output: TimeSeriesOutput,
    pub audit: EnergyAudit,
    pub machine_audit: Option<MachineAudit>,
    pub final_state: Vec<f64>,
    pub steps: usize,
}

/// Prepares and integrates a scenario.
pub fn integrate(scenario: &Scenario) -> Result<RunResult> {
    Simulation::new(scenario)?.run()
}

impl Simulation {
    /// Fixed-step classical Runge-Kutta integration from the initial state.
    /// The wind is held at the sample for the start of each step.
    pub fn run(&self) -> Result<RunResult> {
        let x0 = self.initial_state()?;
        self.run_from(x0)
    }

    pub fn run_from(&self, mut x: Vec<f64>) -> Result<RunResult> {
        let cfg = &self.scenario.integrator;
        let n = x.len();
        let h = cfg.dt;
        let steps = cfg.n_steps();
        let every = cfg.output_every();
        let columns: Vec<usize> = self
            .scenario
            .outputs
            .iter()
            .map(|c| SIGNALS.iter().position(|s| s == c).expect("validated column"))
            .collect();
        let mut header = vec!["t".to_string()];
        header.extend(self.scenario.outputs.iter().cloned());

        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        let mut scratch = vec![0.0; n];

        let mut integral = [0.0; flow::COUNT];
        let start = self.eval(0.0, 0.0, &x, &mut scratch)?;
        let stored_start = start.stored;
        let magnetic_start = start.magnetic;
        let mut rows = Vec::with_capacity(steps / every + 1);
        let push_row = |rows: &mut Vec<Vec<f64>>, t: f64, e: &Eval, integral: &[f64; flow::COUNT]| {
            let mut sig = e.signals;
            sig[SIG_RESIDUAL] = residual(e.stored - stored_start, integral);
            let mut row = Vec::with_capacity(columns.len() + 1);
            row.push(t);
            row.extend(columns.iter().map(|&c| sig[c]));
            rows.push(row);
        };
        push_row(&mut rows, 0.0, &start, &integral);

        let mut last = start;
        for step in 0..steps {
            let t = step as f64 * h;
            let e1 = self.eval(t, t, &x, &mut k1)?;
            axpy(&mut tmp, &x, 0.5 * h, &k1);
            let e2 = self.eval(t + 0.5 * h, t, &tmp, &mut k2)?;
            axpy(&mut tmp, &x, 0.5 * h, &k2);
            let e3 = self.eval(t + 0.5 * h, t, &tmp, &mut k3)?;
            axpy(&mut tmp, &x, h, &k3);
            let e4 = self.eval(t + h, t, &tmp, &mut k4)?;
            for i in 0..n {
                x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            for q in 0..flow::COUNT {
                integral[q] += h / 6.0 * (e1.flows[q] + 2.0 * e2.flows[q] + 2.0 * e3.flows[q] + e4.flows[q]);
            }
            if let Some(i) = x.iter().position(|v| !v.is_finite()) {
                return Err(Error::NumericalAbort {
                    step: step + 1,
                    time: t + h,
                    component: format!(
                        "{} ({})",
                        self.layout().component(i),
                        self.layout().names().nth(i).unwrap_or_default()
                    ),
                });
            }
            let done = step + 1;
            if done % every == 0 || done == steps {
                let tn = done as f64 * h;
                let e = self.eval(tn, tn, &x, &mut scratch)?;
                if done % every == 0 {
                    push_row(&mut rows, tn, &e, &integral);
                }
                if done == steps {
                    last = e;
                }
            }
        }

        let audit = EnergyAudit {
            aero_in: integral[flow::AERO],
            external_in: integral[flow::EXTERNAL],
            source_in: integral[flow::SOURCE],
            dissipated: integral[flow::LOSS],
            stored_start,
            stored_end: last.stored,
        };
        let machine_audit = self.scenario.machine.as_ref().map(|_| MachineAudit {
            electrical_in: integral[flow::MACHINE_ELECTRICAL],
            copper_loss: integral[flow::MACHINE_COPPER],
            mechanical_out: integral[flow::MACHINE_MECHANICAL],
            magnetic_start,
            magnetic_end: last.magnetic,
        });
        Ok(RunResult {
            output: TimeSeriesOutput {
                columns: header,
                rows,
            },
            audit,
            machine_audit,
            final_state: x,
            steps,
        })
    }
}

fn residual(stored_change: f64, integral: &[f64; flow::COUNT]) -> f64 {
    stored_change
        - (integral[flow::AERO] + integral[flow::EXTERNAL] + integral[flow::SOURCE] - integral[flow::LOSS])
}

fn axpy(out: &mut [f64], x: &[f64], a: f64, k: &[f64]) {
    for ((o, xi), ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + a * ki;
    }
}
