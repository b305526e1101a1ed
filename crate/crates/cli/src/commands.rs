use std::path::{Path, PathBuf};

use tchm::analytic::band_points;
use tchm::config::RunConfig;
use tchm::effective::solve_realization;
use tchm::ensemble::{figure_preset, run_sweep, run_sweep_with_jobs, BandsPreset, Preset, SweepResult, SweepSpec};
use tchm::lindblad::{all_elements, emission_spectra, pump_summed_spectra, EmissionOptions, SpectrumTrace};
use tchm::metrics::{classify_bands, participation_reports};
use tchm::model::{ghz_to_angular, sample_disorder, Realization};
use tchm::{Error, Result};

use crate::output::{emit, write_atomic, Cell, Table};
use crate::{BandsArgs, Cli, Command, EigsArgs, QmeArgs, SweepArgs};

fn usage(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Bands(args) => bands(cli, args),
        Command::Eigs(args) => eigs(cli, args),
        Command::Metrics => metrics(cli),
        Command::QmeSpectrum(args) => qme_spectrum(cli, args),
        Command::Sweep(args) => sweep(cli, args),
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    eprint!("# resolved configuration\n{}", cfg.to_config_text());
    Ok(cfg)
}

fn realization(cfg: &RunConfig) -> Result<Realization> {
    sample_disorder(&cfg.params, cfg.seed)
}

fn bands_table(b: &BandsPreset) -> Result<Table> {
    let mut t = Table::new(["k", "e_minus", "e_plus", "photon_weight_minus", "photon_weight_plus"]);
    for p in band_points(b.n_cavities, b.emitters_per_cavity, b.boundary, b.omega_0, b.j, b.g)? {
        t.push(vec![
            p.k.into(),
            p.e_minus.into(),
            p.e_plus.into(),
            p.weights_minus.0.into(),
            p.weights_plus.0.into(),
        ]);
    }
    Ok(t)
}

fn bands(cli: &Cli, a: &BandsArgs) -> Result<()> {
    let b = BandsPreset {
        n_cavities: a.n,
        emitters_per_cavity: a.m,
        boundary: a.boundary,
        omega_0: a.omega0,
        j: a.j,
        g: a.g,
    };
    if b.n_cavities == 0 {
        return Err(usage("n", "must be at least 1"));
    }
    eprintln!("# bands: {b:?}");
    let t = bands_table(&b)?;
    Ok(emit(cli.output.as_deref(), &t.render(cli.format))?)
}

fn eigs(cli: &Cli, a: &EigsArgs) -> Result<()> {
    let cfg = load_config(cli)?;
    let states = solve_realization(&realization(&cfg)?)?;
    let n = cfg.params.n_cavities;
    let mut header: Vec<String> = ["state_index", "re_energy", "im_energy", "photon_weight", "emitter_weight"]
        .map(String::from)
        .to_vec();
    if a.occupancies {
        header.extend((1..=n).map(|k| format!("photon_{k}")));
        header.extend((1..=n).map(|k| format!("emitter_{k}")));
    }
    let mut t = Table::new(header);
    for (i, s) in states.iter().enumerate() {
        let occ = &s.occupancies;
        let mut row: Vec<Cell> = vec![
            i.into(),
            s.energy.re.into(),
            s.energy.im.into(),
            occ.total_photon().into(),
            occ.total_emitter().into(),
        ];
        if a.occupancies {
            row.extend(occ.photon.iter().map(|&x| Cell::Num(x)));
            row.extend(occ.emitter.iter().map(|&x| Cell::Num(x)));
        }
        t.push(row);
    }
    Ok(emit(cli.output.as_deref(), &t.render(cli.format))?)
}

fn metrics(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    let states = solve_realization(&realization(&cfg)?)?;
    let reports = participation_reports(&states, &cfg.params)?;
    let labels = classify_bands(&states, &cfg.params)?;
    let mut t = Table::new([
        "state_index",
        "re_energy",
        "im_energy",
        "band",
        "p_n_raw",
        "p_n_norm",
        "p_p_raw",
        "p_p_norm",
    ]);
    for (i, ((s, r), band)) in states.iter().zip(&reports).zip(&labels).enumerate() {
        t.push(vec![
            i.into(),
            s.energy.re.into(),
            s.energy.im.into(),
            band.as_str().into(),
            r.p_n_raw.into(),
            r.p_n_norm.into(),
            r.p_p_raw.into(),
            r.p_p_norm.into(),
        ]);
    }
    Ok(emit(cli.output.as_deref(), &t.render(cli.format))?)
}

fn qme_spectrum(cli: &Cli, a: &QmeArgs) -> Result<()> {
    let cfg = load_config(cli)?;
    let real = realization(&cfg)?;
    let opts = EmissionOptions {
        pump_rate: ghz_to_angular(a.pump_rate),
        fock_cutoff: a.fock_cutoff,
        max_dimension: a.max_dimension,
        ..Default::default()
    };
    eprintln!(
        "# pump_cavity = {}\n# pump_rate_ghz = {:?}\n# fock_cutoff = {}\n# sum_pumps = {}",
        a.pump_cavity, a.pump_rate, a.fock_cutoff, a.sum_pumps
    );
    let probes = all_elements(&real);
    let traces: Vec<SpectrumTrace> = if a.sum_pumps {
        pump_summed_spectra(&real, &probes, &opts)?
    } else {
        emission_spectra(&real, a.pump_cavity, &probes, &opts)?
    };
    for tr in &traces {
        if let Some(w) = tr.spectrum.warning() {
            eprintln!("warning: {}: {w}", tr.probe.label());
        }
    }
    let omega: Vec<f64> = match (a.omega_min, a.omega_max, a.points) {
        (Some(lo), Some(hi), Some(points)) => {
            if points < 2 || hi <= lo {
                return Err(usage("omega-min/omega-max/points", "need omega-min < omega-max and at least 2 points"));
            }
            (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect()
        }
        _ => traces[0].spectrum.omega.clone(),
    };
    let columns: Vec<Vec<f64>> = traces
        .iter()
        .map(|tr| {
            let s = &tr.spectrum;
            let scale = if a.normalize { 1.0 / s.max_intensity() } else { 1.0 };
            omega.iter().map(|&w| s.at(w) * scale).collect()
        })
        .collect();
    let mut header = vec!["omega".to_string()];
    header.extend(traces.iter().map(|tr| tr.probe.label()));
    let mut t = Table::new(header);
    for (k, &w) in omega.iter().enumerate() {
        let mut row = vec![Cell::Num(w)];
        row.extend(columns.iter().map(|c| Cell::Num(c[k])));
        t.push(row);
    }
    Ok(emit(cli.output.as_deref(), &t.render(cli.format))?)
}

fn sweep_tables(result: &SweepResult) -> Vec<(&'static str, Table)> {
    let axis = result.spec.axis.kind.as_str();
    result
        .spec
        .observables
        .iter()
        .map(|&obs| {
            let mut t = Table::new(["series", axis, "selector", "quantity", "mean", "std", "count"]);
            for r in result.records_for(obs) {
                t.push(vec![
                    r.series.clone().into(),
                    r.axis_value.into(),
                    r.selector.to_string().into(),
                    r.quantity.into(),
                    r.stat.mean.into(),
                    r.stat.std.into(),
                    r.stat.count.into(),
                ]);
            }
            (obs.as_str(), t)
        })
        .collect()
}

fn sweep(cli: &Cli, a: &SweepArgs) -> Result<()> {
    if cli.config.is_some() {
        return Err(usage("config", "`sweep` reads its parameters from --preset or --spec"));
    }
    let preset = match (&a.source.preset, &a.source.spec) {
        (Some(name), _) => figure_preset(name)?,
        (None, Some(path)) => Preset::Sweep(SweepSpec::load(path)?),
        (None, None) => unreachable!("clap requires one source"),
    };
    let default_dir = match &preset {
        Preset::Sweep(s) => s.name.clone(),
        Preset::Bands(_) => a.source.preset.clone().unwrap_or_default(),
    };
    let dir: PathBuf = cli.output.clone().unwrap_or_else(|| PathBuf::from(default_dir));
    std::fs::create_dir_all(&dir)?;
    let file = |stem: &str, ext: &str| -> PathBuf { Path::new(&dir).join(format!("{stem}.{ext}")) };

    let mut spec = match preset {
        Preset::Bands(b) => {
            eprintln!("# bands: {b:?}");
            write_atomic(&file("bands", cli.format.extension()), &bands_table(&b)?.render(cli.format))?;
            return Ok(());
        }
        Preset::Sweep(spec) => spec,
    };
    if let Some(r) = a.realizations {
        spec.realizations = r;
    }
    if let Some(seed) = cli.seed {
        spec.master_seed = seed;
    }
    spec.validate()?;
    eprintln!("# resolved sweep\n{}", serde_json::to_string_pretty(&spec)?);

    let result = match a.jobs {
        Some(jobs) => run_sweep_with_jobs(&spec, jobs)?,
        None => run_sweep(&spec)?,
    };
    for (stem, table) in sweep_tables(&result) {
        write_atomic(&file(stem, cli.format.extension()), &table.render(cli.format))?;
    }
    let mut manifest = serde_json::to_vec_pretty(&result.manifest())?;
    manifest.push(b'\n');
    write_atomic(&file("manifest", "json"), &manifest)?;
    Ok(())
}
