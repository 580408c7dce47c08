use std::f64::consts::PI;

use num_complex::Complex;

use crate::bohm::{bohm_momentum, polar_decompose, residuals_of, BohmFieldSet, ResidualReport, SliceFields};
use crate::clifford::{
    algebraic_residuals_of, clifford_wigner_cev, density_element, pauli_bohm_components, pauli_bohm_euler,
    pauli_liouville_residual, purity_check, schrodinger_embed, spin_slice, spinor_purity, spinor_to_euler,
    AlgebraicResiduals, PauliSpinorField, SpinSlice,
};
use crate::error::Result;
use crate::grid::to_momentum_rep;
use crate::moyal::{
    cev_momentum, classical_limit_report, energy_symbol_residual, moyal_liouville_step, weak_value_momentum,
    wigner_transform, Backend, BracketConfig, PhaseHamiltonian, PolySymbol,
};
use crate::schrodinger::{
    free_gaussian, harmonic_eigenstate, plane_wave, plane_wave_k, split_step_evolve, Propagation,
};
use crate::trajectories::{equivariance_check, integrate_ensemble_with, sample_initial};
use crate::{Grid, Masked as MaskedField, Record, Wave, C64};

use super::config::{initial_components, PacketSpec, PropagatorKind, ScenarioConfig, StateSpec, Terms};
use super::output::{encode_mbw, plot_script, AnalysisEntry, OutputFile, RunOutput, RunReport, Table};
use super::FORMAT_VERSION;

/// Acceptance bounds attached to report checks.
pub mod bounds {
    pub const ENERGY_IDENTITY: f64 = 1e-10;
    pub const LIOUVILLE_CONTINUITY: f64 = 1e-8;
    pub const PURITY: f64 = 1e-8;
    pub const MOMENTUM_CEV: f64 = 1e-6;
    pub const PAULI: f64 = 1e-6;
    pub const EXPONENT: f64 = 1e-3;
    pub const MOYAL_LIOUVILLE: f64 = 1e-5;
    pub const KS: f64 = 0.02;
    pub const MARGINAL: f64 = 1e-8;
}

const PATHS_KEPT: usize = 32;

/// Validates `cfg` and executes every requested analysis.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let mut entries: Vec<AnalysisEntry> = cfg.analyses.iter().map(|a| AnalysisEntry::new(a)).collect();
    let mut files: Vec<OutputFile> = Vec::new();
    let mut tables: Vec<(String, Vec<&'static str>)> = Vec::new();
    let mut images: Vec<(String, usize)> = Vec::new();

    let hbars = cfg.run_hbars();
    let tagged = hbars.len() > 1;
    for (ih, &hbar) in hbars.iter().enumerate() {
        let ctx = Context::new(cfg, hbar, if tagged { format!("_h{ih}") } else { String::new() })?;
        let mut out = Sink {
            files: &mut files,
            tables: &mut tables,
            images: &mut images,
        };
        for entry in entries.iter_mut() {
            match entry.name.as_str() {
                "bohm_fields" => ctx.bohm_fields(entry, &mut out)?,
                "residuals" => ctx.residuals(entry, &mut out)?,
                "clifford" => ctx.clifford(entry, &mut out)?,
                "momentum_cev" => ctx.momentum_cev(entry, &mut out)?,
                "wigner" => ctx.wigner(entry, &mut out)?,
                "trajectories" => ctx.trajectories(entry, &mut out)?,
                "energy_symbol" => ctx.energy_symbol(entry, &mut out)?,
                "moyal_liouville" => ctx.moyal_liouville(entry, &mut out)?,
                "pauli" => ctx.pauli(entry, &mut out)?,
                _ => {}
            }
        }
    }
    if let Some(entry) = entries.iter_mut().find(|e| e.name == "classical_limit") {
        let mut out = Sink {
            files: &mut files,
            tables: &mut tables,
            images: &mut images,
        };
        classical_limit(cfg, entry, &mut out);
    }
    files.push(plot_script(&tables, &images));

    Ok(RunOutput {
        report: RunReport {
            format_version: FORMAT_VERSION,
            scenario: cfg.scenario.clone(),
            seed: cfg.ensemble.seed,
            config: cfg.clone(),
            analyses: entries,
        },
        files,
    })
}

struct Sink<'a> {
    files: &'a mut Vec<OutputFile>,
    tables: &'a mut Vec<(String, Vec<&'static str>)>,
    images: &'a mut Vec<(String, usize)>,
}

impl Sink<'_> {
    fn table(&mut self, entry: &mut AnalysisEntry, name: String, t: &Table) {
        self.tables.push((name.clone(), t.column_names()));
        self.files.push(t.file(name.clone()));
        entry.files.push(name);
    }

    fn binary(&mut self, entry: &mut AnalysisEntry, name: String, n: usize, bytes: Vec<u8>) {
        self.images.push((name.clone(), n));
        self.files.push(OutputFile { name: name.clone(), bytes });
        entry.files.push(name);
    }
}

/// One evolution (per `hbar`) shared by the analyses.
struct Context<'a> {
    cfg: &'a ScenarioConfig,
    hbar: f64,
    mass: f64,
    tag: String,
    grid: Grid,
    /// One record, or one per spinor component.
    records: Vec<Record>,
    slices: Vec<Vec<SliceFields<f64>>>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ScenarioConfig, hbar: f64, tag: String) -> Result<Self> {
        let grid = cfg.build_grid()?;
        let records = evolve(cfg, grid, hbar, cfg.evolution.stride)?;
        let needs_slices = cfg.analyses.iter().any(|a| a == "residuals" || a == "clifford");
        let slices = if needs_slices {
            records
                .iter()
                .map(|r| (0..r.len()).map(|k| SliceFields::new(r.triple(k), hbar)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(Self {
            cfg,
            hbar,
            mass: cfg.physics.mass,
            tag,
            grid,
            records,
            slices,
        })
    }

    fn record(&self) -> &Record {
        &self.records[0]
    }

    fn times(&self) -> &[f64] {
        &self.record().times
    }

    fn name(&self, stem: &str, k: Option<usize>) -> String {
        match k {
            Some(k) => format!("{stem}{}_t{k:03}.dat", self.tag),
            None => format!("{stem}{}.dat", self.tag),
        }
    }

    fn table(&self, quantity: &str, columns: &[(&'static str, &'static str)]) -> Table {
        Table::new(&self.cfg.scenario, quantity, columns)
            .grid(&self.grid)
            .meta("hbar", self.hbar)
            .meta("mass", self.mass)
    }

    fn spin(&self, k: usize) -> Result<SpinSlice<PauliSpinorField<f64>>> {
        spin_slice(&self.records[0], &self.records[1], self.times()[k])
    }

    fn bohm_fields(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        let rec = self.record();
        let v = rec.potential.sample(&self.grid, self.mass)?;
        for k in 0..rec.len() {
            let pf = polar_decompose(&rec.states[k], self.hbar)?;
            let next = polar_decompose(rec.pair(k).1, self.hbar)?;
            let set = BohmFieldSet::new(&pf, self.mass, Some((&next, rec.dt)))?;
            let e_b = set.e_b.as_ref().expect("energy requested");
            let mut t = self
                .table(
                    "bohm_fields",
                    &[
                        ("x", "L"),
                        ("rho", "1/L"),
                        ("S", "hbar"),
                        ("P_B", "hbar/L"),
                        ("Q", "E"),
                        ("V", "E"),
                        ("E_B", "E"),
                        ("mask", "flag"),
                    ],
                )
                .meta("t", rec.times[k]);
            for j in 0..self.grid.n() {
                let mask = set.p_b.mask[j] || set.q.mask[j] || e_b.mask[j];
                t.row(vec![
                    self.grid.x(j),
                    set.rho.values[j],
                    pf.s.values[j],
                    set.p_b.values()[j],
                    set.q.values()[j],
                    v.values[j],
                    e_b.values()[j],
                    mask as u8 as f64,
                ]);
            }
            out.table(entry, self.name("bohm_fields", Some(k)), &t);
            entry.max("p_b_max_abs", set.p_b.max_abs());
            entry.max("q_max_abs", set.q.max_abs());
            entry.max("masked_points", set.p_b.masked_count() as f64);
        }
        entry.max("norm_drift", rec.norm_drift());
        Ok(())
    }

    fn residual_reports(&self, c: usize) -> Result<Vec<ResidualReport<f64>>> {
        self.slices[c].iter().map(|s| residuals_of(s, &self.records[c])).collect()
    }

    fn residuals(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        let mut t = self.table(
            "residuals",
            &[
                ("t", "T"),
                ("component", "index"),
                ("continuity_max", "1/(L T)"),
                ("qhj_max", "E"),
                ("energy_conservation_max", "E"),
                ("energy_identity_gap", "E"),
            ],
        );
        for c in 0..self.records.len() {
            for (k, r) in self.residual_reports(c)?.iter().enumerate() {
                t.row(vec![
                    self.times()[k],
                    c as f64,
                    r.continuity_max,
                    r.qhj_max,
                    r.energy_conservation_max,
                    r.energy_identity_gap,
                ]);
                entry.max("continuity_max", r.continuity_max);
                entry.max("qhj_max", r.qhj_max);
                entry.max("energy_conservation_max", r.energy_conservation_max);
                entry.max("energy_identity_gap", r.energy_identity_gap);
                entry.check("energy_identity", r.energy_identity_gap, bounds::ENERGY_IDENTITY);
            }
        }
        out.table(entry, self.name("residuals", None), &t);
        Ok(())
    }

    fn clifford(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        let mut t = self.table(
            "clifford",
            &[
                ("t", "T"),
                ("component", "index"),
                ("liouville_max", "1/(L T)"),
                ("continuity_max", "1/(L T)"),
                ("qhj_algebraic", "E"),
                ("qhj_polar", "E"),
                ("purity", "1"),
            ],
        );
        for c in 0..self.records.len() {
            let rec = &self.records[c];
            let polar = self.residual_reports(c)?;
            for (k, slice) in self.slices[c].iter().enumerate() {
                let alg: AlgebraicResiduals<f64> = algebraic_residuals_of(slice, rec)?;
                let purity = purity_check(&density_element(&schrodinger_embed(&slice.polar))?.local_normalized());
                let r = &polar[k];
                t.row(vec![
                    rec.times[k],
                    c as f64,
                    alg.liouville_max,
                    r.continuity_max,
                    alg.qhj_max,
                    r.qhj_max,
                    purity,
                ]);
                let gap = (alg.liouville_max - r.continuity_max).abs();
                entry.max("liouville_max", alg.liouville_max);
                entry.max("qhj_max", alg.qhj_max);
                entry.max("liouville_continuity_gap", gap);
                entry.max("qhj_gap", (alg.qhj_max - r.qhj_max).abs());
                entry.max("purity_max", purity);
                entry.check("liouville_vs_continuity", gap, bounds::LIOUVILLE_CONTINUITY);
                entry.check("purity", purity, bounds::PURITY);
            }
        }
        out.table(entry, self.name("clifford", None), &t);

        if self.records.len() == 2 {
            let mut p = self.table(
                "pauli_liouville",
                &[
                    ("t", "T"),
                    ("trace_max", "1/(L T)"),
                    ("full_max", "1/(L T)"),
                    ("continuity_max", "1/(L T)"),
                    ("purity", "1"),
                ],
            );
            for k in 0..self.record().len() {
                let slice = self.spin(k)?;
                let l = pauli_liouville_residual(&slice, self.mass)?;
                let purity = spinor_purity(&slice.at)?;
                p.row(vec![self.times()[k], l.trace_max, l.full_max, l.continuity_max, purity]);
                let gap = (l.trace_max - l.continuity_max).abs();
                entry.max("pauli_trace_max", l.trace_max);
                entry.max("pauli_full_max", l.full_max);
                entry.max("pauli_continuity_max", l.continuity_max);
                entry.max("pauli_trace_continuity_gap", gap);
                entry.max("pauli_purity_max", purity);
                entry.check("pauli_trace_vs_continuity", gap, bounds::LIOUVILLE_CONTINUITY);
                entry.check("pauli_purity", purity, bounds::PURITY);
            }
            out.table(entry, self.name("pauli_liouville", None), &p);
        }
        Ok(())
    }

    fn momentum_cev(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        let rec = self.record();
        for k in 0..rec.len() {
            let psi = &rec.states[k];
            let p_b = bohm_momentum(&polar_decompose(psi, self.hbar)?);
            let cev = cev_momentum(&wigner_transform(psi, self.hbar));
            let weak = weak_value_momentum(psi, self.hbar);
            let (re, im) = (weak.real(), weak.imag());
            let gap = cev.max_gap(&p_b)?;
            entry.max("cev_gap", gap);
            entry.max("weak_value_gap", re.max_gap(&p_b)?);
            entry.check("cev_vs_bohm_momentum", gap, bounds::MOMENTUM_CEV);
            let mut t = self
                .table(
                    "momentum_cev",
                    &[
                        ("x", "L"),
                        ("P_B", "hbar/L"),
                        ("cev", "hbar/L"),
                        ("weak_re", "hbar/L"),
                        ("weak_im", "hbar/L"),
                        ("mask", "flag"),
                    ],
                )
                .meta("t", rec.times[k]);
            for j in 0..self.grid.n() {
                t.row(vec![
                    self.grid.x(j),
                    p_b.values()[j],
                    cev.values()[j],
                    re.values()[j],
                    im.values()[j],
                    (p_b.mask[j] || cev.mask[j]) as u8 as f64,
                ]);
            }
            out.table(entry, self.name("momentum_cev", Some(k)), &t);
        }
        Ok(())
    }

    fn wigner(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        let rec = self.record();
        let last = rec.len() - 1;
        for k in 0..rec.len() {
            let psi = &rec.states[k];
            let w = wigner_transform(psi, self.hbar);
            let rho = psi.density();
            let phi = to_momentum_rep(psi, self.hbar).density();
            let (xm, pm) = (w.x_marginal(), w.p_marginal());
            let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            let (ex, ep) = (gap(&xm, &rho.values), gap(&pm, &phi));
            entry.max("x_marginal_error", ex);
            entry.max("p_marginal_error", ep);
            entry.min("min_value", w.min());
            entry.max("total_error", (w.total() - psi.norm_sqr()).abs());
            entry.check("x_marginal", ex, bounds::MARGINAL);
            entry.check("p_marginal", ep, bounds::MARGINAL);
            if k == last {
                let pg = w.psgrid.pgrid;
                let mut t = self
                    .table(
                        "wigner_marginals",
                        &[
                            ("x", "L"),
                            ("x_marginal", "1/L"),
                            ("rho", "1/L"),
                            ("p", "hbar/L"),
                            ("p_marginal", "L/hbar"),
                            ("phi_sq", "L/hbar"),
                        ],
                    )
                    .meta("t", rec.times[k])
                    .meta("pgrid", format!("p_min={} p_max={} n={} dp={}", pg.x_min(), pg.x_max(), pg.n(), pg.dx()));
                for j in 0..self.grid.n() {
                    t.row(vec![self.grid.x(j), xm[j], rho.values[j], pg.x(j), pm[j], phi[j]]);
                }
                out.table(entry, self.name("wigner_marginals", None), &t);
                out.binary(entry, format!("wigner{}.mbw", self.tag), w.n(), encode_mbw(&w));
            }
        }
        Ok(())
    }

    fn trajectories(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        let rec = self.record();
        let sub = self.cfg.trajectory_substride();
        let fine;
        let through = if sub == self.cfg.evolution.stride {
            rec
        } else {
            fine = evolve(self.cfg, self.grid, self.hbar, sub)?.remove(0);
            &fine
        };
        let seed = self.cfg.ensemble.seed;
        let init = sample_initial(&rec.states[0].density(), self.cfg.ensemble.particles, seed)?;
        let ens = integrate_ensemble_with(through, &init, self.cfg.evolution.stride / sub, seed)?;

        let mut stats = self.table(
            "trajectory_statistics",
            &[("t", "T"), ("ks", "1"), ("mean", "L"), ("std", "L"), ("inside", "count")],
        );
        for (k, &t) in ens.times.iter().enumerate() {
            let ks = equivariance_check(&ens, rec, t)?;
            let snap = ens.snapshot(k);
            let n = snap.len() as f64;
            let mean = snap.iter().sum::<f64>() / n;
            let var = snap.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            stats.row(vec![t, ks, mean, var.sqrt(), n]);
            entry.max("ks_max", ks);
            entry.check("ks", ks, bounds::KS);
        }
        let crossings = ens.crossing_violations() as f64;
        entry.max("crossings", crossings);
        entry.max("exited", ens.exited.iter().filter(|&&e| e).count() as f64);
        entry.max("particles", ens.n_particles as f64);
        entry.check("crossings", crossings, 0.0);
        out.table(entry, self.name("trajectory_statistics", None), &stats);

        let mut order: Vec<usize> = (0..ens.n_particles).collect();
        order.sort_by(|&a, &b| init[a].total_cmp(&init[b]));
        let picks: Vec<usize> = (0..PATHS_KEPT.min(order.len()))
            .map(|i| order[(2 * i + 1) * order.len() / (2 * PATHS_KEPT.min(order.len()))])
            .collect();
        const PATH_COLUMNS: [(&str, &str); PATHS_KEPT + 1] = {
            let mut c = [("x", "L"); PATHS_KEPT + 1];
            c[0] = ("t", "T");
            c
        };
        let mut paths = self
            .table("trajectory_paths", &PATH_COLUMNS[..picks.len() + 1])
            .meta("paths", "x columns are particles at evenly spaced ranks of the initial ensemble");
        for (k, &t) in ens.times.iter().enumerate() {
            let mut row = vec![t];
            row.extend(picks.iter().map(|&i| ens.position(i, k)));
            paths.row(row);
        }
        out.table(entry, self.name("trajectory_paths", None), &paths);
        Ok(())
    }

    fn energy_symbol(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        let rec = self.record();
        let mut t = self.table("energy_symbol", &[("t", "T"), ("residual_max", "E/hbar")]);
        for &time in &rec.times {
            let r = energy_symbol_residual(rec, time)?;
            t.row(vec![time, r]);
            entry.max("residual_max", r);
        }
        out.table(entry, self.name("energy_symbol", None), &t);
        Ok(())
    }

    fn moyal_liouville(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        let rec = self.record();
        let h = PhaseHamiltonian::Separable {
            mass: self.mass,
            potential: rec.potential.clone(),
        };
        let bc = BracketConfig::new(self.hbar, 4, Backend::Spectral)?;
        let sub = self.cfg.moyal.substeps;
        let mut f = wigner_transform(&rec.states[0], self.hbar);
        let mut t = self.table("moyal_liouville", &[("t", "T"), ("gap", "1/hbar")]);
        for k in 0..rec.len() {
            if k > 0 {
                let step = (rec.times[k] - rec.times[k - 1]) / sub as f64;
                for _ in 0..sub {
                    f = moyal_liouville_step(&f, &h, step, &bc)?;
                }
            }
            let gap = f.max_gap(&wigner_transform(&rec.states[k], self.hbar))?;
            t.row(vec![rec.times[k], gap]);
            entry.max("gap_max", gap);
            entry.check("liouville_vs_schrodinger", gap, bounds::MOYAL_LIOUVILLE);
        }
        out.table(entry, self.name("moyal_liouville", None), &t);
        Ok(())
    }

    fn pauli(&self, entry: &mut AnalysisEntry, out: &mut Sink) -> Result<()> {
        for k in 0..self.record().len() {
            let slice = self.spin(k)?;
            let paths = pauli_paths(&slice)?;
            record_paths(entry, "", &paths, None);
            let mut t = self
                .table(
                    "pauli",
                    &[
                        ("x", "L"),
                        ("rho", "1/L"),
                        ("P_bilinear", "hbar/L"),
                        ("P_weighted", "hbar/L"),
                        ("P_euler", "hbar/L"),
                        ("P_cev", "hbar/L"),
                        ("E_B", "E"),
                        ("E_B_euler", "E"),
                        ("theta", "rad"),
                        ("phi", "rad"),
                        ("psi_E", "rad"),
                        ("mask", "flag"),
                    ],
                )
                .meta("t", self.times()[k]);
            let rho = slice.at.rho();
            for j in 0..self.grid.n() {
                let p = &paths;
                let mask = p.momenta.iter().any(|m| m.mask[j]) || p.energies.iter().any(|m| m.mask[j]);
                t.row(vec![
                    self.grid.x(j),
                    rho[j],
                    p.momenta[0].values()[j],
                    p.momenta[1].values()[j],
                    p.momenta[2].values()[j],
                    p.momenta[3].values()[j],
                    p.energies[0].values()[j],
                    p.energies[1].values()[j],
                    p.euler.0[j],
                    p.euler.1[j],
                    p.euler.2[j],
                    mask as u8 as f64,
                ]);
            }
            out.table(entry, self.name("pauli", Some(k)), &t);
        }

        let slice = reference_spinor(self.grid, self.cfg.pauli.reference_mode, self.hbar, self.mass, self.record().dt)?;
        let half_k = self.hbar * plane_wave_k(&self.grid, self.cfg.pauli.reference_mode) / 2.0;
        let paths = pauli_paths(&slice)?;
        record_paths(entry, "reference_", &paths, Some(half_k));
        entry.max("reference_momentum", half_k);
        Ok(())
    }
}

struct PauliPaths {
    /// Bilinear, weighted-mean, Euler-angle, Clifford-Wigner CEV.
    momenta: [MaskedField; 4],
    /// Component and Euler-angle Bohm energies.
    energies: [MaskedField; 2],
    euler: (Vec<f64>, Vec<f64>, Vec<f64>),
}

const PATH_NAMES: [&str; 4] = ["bilinear", "weighted", "euler", "cev"];

fn pauli_paths(slice: &SpinSlice<PauliSpinorField<f64>>) -> Result<PauliPaths> {
    let comps = pauli_bohm_components(slice)?;
    let eslice = slice.map(|s| Ok(spinor_to_euler(s)))?;
    let euler = pauli_bohm_euler(&eslice)?;
    let cev = clifford_wigner_cev(&slice.at);
    let e = &eslice.at;
    Ok(PauliPaths {
        momenta: [comps.p_bilinear, comps.p_weighted, euler.p_b, cev],
        energies: [comps.e_b, euler.e_b],
        euler: (e.theta.values.clone(), e.phi.values.clone(), e.psi_e.values.clone()),
    })
}

fn record_paths(entry: &mut AnalysisEntry, prefix: &str, p: &PauliPaths, exact: Option<f64>) {
    for i in 0..4 {
        for j in i + 1..4 {
            let gap = p.momenta[i].max_gap(&p.momenta[j]).expect("same grid");
            let key = format!("{prefix}{}_vs_{}", PATH_NAMES[i], PATH_NAMES[j]);
            entry.max(&format!("{key}_gap"), gap);
            entry.check(&key, gap, bounds::PAULI);
        }
        if let Some(v) = exact {
            let err = p.momenta[i].max_error(|_| v);
            let key = format!("{prefix}{}_vs_exact", PATH_NAMES[i]);
            entry.max(&format!("{key}_gap"), err);
            entry.check(&key, err, bounds::PAULI);
        }
    }
    let gap = p.energies[0].max_gap(&p.energies[1]).expect("same grid");
    entry.max(&format!("{prefix}energy_components_vs_euler_gap"), gap);
    entry.check(&format!("{prefix}energy_components_vs_euler"), gap, bounds::PAULI);
}

/// `(cos(pi/6) e^{ikx}, i sin(pi/6) e^{-ikx})` under free evolution, whose
/// Bohm momentum is `hbar k / 2` everywhere.
fn reference_spinor(grid: Grid, mode: i64, hbar: f64, mass: f64, dt: f64) -> Result<SpinSlice<PauliSpinorField<f64>>> {
    let k = plane_wave_k(&grid, mode);
    let at = |t: f64| {
        let phase = Complex::from_polar(1.0, -hbar * k * k * t / (2.0 * mass));
        let up = plane_wave(grid, mode).map(|v| v * phase * (PI / 6.0).cos());
        let down = plane_wave(grid, -mode).map(|v| v * phase * C64::new(0.0, (PI / 6.0).sin()));
        PauliSpinorField::new(up, down, hbar)
    };
    Ok(SpinSlice {
        before: at(-dt)?,
        at: at(0.0)?,
        after: at(dt)?,
        dt,
    })
}

fn classical_limit(cfg: &ScenarioConfig, entry: &mut AnalysisEntry, out: &mut Sink) {
    let sweep = cfg.sweep.as_ref().expect("validated");
    let poly = |t: &Terms| PolySymbol::from_terms(t.iter().map(|&(a, b, c)| ((a, b), C64::new(c, 0.0))));
    let report = classical_limit_report(&poly(&sweep.a), &poly(&sweep.b), &sweep.hbars, sweep.window);
    let mut t = Table::new(&cfg.scenario, "classical_limit", &[
        ("hbar", "hbar"),
        ("moyal_minus_poisson", "symbol"),
        ("baker_minus_product", "symbol"),
    ])
    .meta("window", sweep.window);
    for r in &report.rows {
        t.row(vec![r.hbar, r.moyal_minus_poisson, r.baker_minus_product]);
    }
    let m = report.moyal_exponent.unwrap_or(f64::NAN);
    let b = report.baker_exponent.unwrap_or(f64::NAN);
    entry.max("moyal_exponent", m);
    entry.max("baker_exponent", b);
    entry.check("moyal_exponent_is_two", (m - 2.0).abs(), bounds::EXPONENT);
    entry.check("baker_exponent_is_two", (b - 2.0).abs(), bounds::EXPONENT);
    out.table(entry, "classical_limit.dat".into(), &t);
}

/// Evolves every wave component of the configured state, keeping a snapshot
/// every `stride` fine steps.
fn evolve(cfg: &ScenarioConfig, grid: Grid, hbar: f64, stride: usize) -> Result<Vec<Record>> {
    let mass = cfg.physics.mass;
    let steps = cfg.steps();
    let dt = cfg.evolution.dt;
    let potential = cfg.potential();
    match cfg.evolution.propagator {
        PropagatorKind::SplitStep => initial_components(&cfg.state, grid, hbar, mass)?
            .iter()
            .map(|psi0| {
                split_step_evolve(
                    psi0,
                    &potential,
                    Propagation {
                        dt,
                        steps,
                        stride,
                        hbar,
                        mass,
                    },
                )
            })
            .collect(),
        PropagatorKind::ClosedForm => {
            let times: Vec<f64> = (0..=steps).step_by(stride).map(|s| s as f64 * dt).collect();
            let n = if cfg.is_spinor() { 2 } else { 1 };
            (0..n)
                .map(|c| {
                    let sol = closed_form(&cfg.state, c, grid, hbar, mass)?;
                    Ok(Record::from_solution(times.clone(), dt, hbar, mass, potential.clone(), sol))
                })
                .collect()
        }
    }
}

fn packet_at(grid: Grid, p: &PacketSpec, t: f64, hbar: f64, mass: f64) -> Wave {
    free_gaussian(grid, p.center, p.width, p.momentum, p.chirp, t, hbar, mass).expect("validated packet")
}

/// Exact `psi_c(t)` for states with a known solution.
fn closed_form(
    state: &StateSpec,
    component: usize,
    grid: Grid,
    hbar: f64,
    mass: f64,
) -> Result<Box<dyn Fn(f64) -> Wave + Send + Sync>> {
    let initial = initial_components(state, grid, hbar, mass)?;
    Ok(match state.clone() {
        StateSpec::Gaussian {
            center,
            width,
            momentum,
            chirp,
        } => {
            let p = PacketSpec {
                center,
                width,
                momentum,
                chirp,
            };
            Box::new(move |t| packet_at(grid, &p, t, hbar, mass))
        }
        StateSpec::Superposition { packets, weights } => {
            // same linear combination as the initial state, same normalization
            let mut sum = Wave::zeros(grid);
            for (w, p) in weights.iter().zip(&packets) {
                for (s, v) in sum.values.iter_mut().zip(&packet_at(grid, p, 0.0, hbar, mass).values) {
                    *s += C64::new(w[0], w[1]) * v;
                }
            }
            let scale = 1.0 / sum.norm_sqr().sqrt();
            Box::new(move |t| {
                let mut out = Wave::zeros(grid);
                for (w, p) in weights.iter().zip(&packets) {
                    let c = C64::new(w[0], w[1]) * scale;
                    for (s, v) in out.values.iter_mut().zip(&packet_at(grid, p, t, hbar, mass).values) {
                        *s += c * v;
                    }
                }
                out
            })
        }
        StateSpec::Harmonic { level, omega } => {
            let psi = harmonic_eigenstate(grid, level, omega, mass, hbar);
            let e = hbar * omega * (level as f64 + 0.5);
            Box::new(move |t| psi.map(|v| v * Complex::from_polar(1.0, -e * t / hbar)))
        }
        StateSpec::PlaneWave { mode } => {
            let k = plane_wave_k(&grid, mode);
            let psi = initial[0].clone();
            Box::new(move |t| psi.map(|v| v * Complex::from_polar(1.0, -hbar * k * k * t / (2.0 * mass))))
        }
        StateSpec::Spinor { up, down, weights } => {
            let p = if component == 0 { up } else { down };
            let norm = (C64::new(weights[0][0], weights[0][1]).norm_sqr()
                + C64::new(weights[1][0], weights[1][1]).norm_sqr())
            .sqrt();
            let w = C64::new(weights[component][0], weights[component][1]) / norm;
            Box::new(move |t| packet_at(grid, &p, t, hbar, mass).map(|v| v * w))
        }
    })
}
