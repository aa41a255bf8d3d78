use std::fs;
use std::path::{Path, PathBuf};

use qsource_core::output::{write_csv, write_pgm, ScanResult};
use qsource_core::scaling::{ELEMENTARY_CHARGE, HBAR};
use qsource_core::scenarios::{
    atom_laser_depletion, current_transition_scan, default_lateral_extent, detector_image, lateral_profile, linspace,
    local_maxima, photodetachment_cross_section, radial_profile, total_current_scan,
};
use qsource_core::sources::{sum_rule_check, GaussianSource, SourceModel};
use qsource_core::{AtomLaserPreset, Energy, Error, PhotodetachmentPreset, PhysicalSystem};

use crate::args::{
    AtomLaserArgs, Common, Format, ImageArgs, Physics, PresetName, ProfileArgs, TotalCurrentArgs, TransitionArgs,
};

const MICRO_EV: f64 = 1e-6 * ELEMENTARY_CHARGE;

/// Why a command stopped; selects the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or parameters (exit 2).
    Usage(String),
    /// Numerical or I/O failure (exit 1).
    Run(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Run(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Run(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Argument(_) | Error::Precondition { .. } | Error::Unsupported(_) => {
                Failure::Usage(e.to_string())
            }
            Error::Range { .. } | Error::Numerical { .. } | Error::Io(_) => Failure::Run(e.to_string()),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// Invocation details recorded in every output file.
pub struct Context {
    pub command_line: String,
    pub output_dir: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Output targets

struct Target {
    path: PathBuf,
    format: Format,
}

impl Target {
    fn resolve(common: &Common, ctx: &Context, stem: &str, allowed: &[Format]) -> Result<Self, Failure> {
        let from_ext = |p: &Path| match p.extension().and_then(|e| e.to_str()) {
            Some("csv") => Some(Format::Csv),
            Some("pgm") => Some(Format::Pgm),
            Some("json") => Some(Format::Json),
            _ => None,
        };
        let format = common
            .format
            .or_else(|| common.output.as_deref().and_then(from_ext))
            .unwrap_or(allowed[0]);
        if !allowed.contains(&format) {
            return usage(format!("{stem} cannot write {format:?} output (allowed: {allowed:?})"));
        }
        let path = common
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{stem}.{}", extension(format))));
        let path = match (&ctx.output_dir, path.is_relative()) {
            (Some(dir), true) => dir.join(path),
            _ => path,
        };
        Ok(Target { path, format })
    }

    /// `out.csv` → `out.<tag>.csv`.
    fn sibling(&self, tag: &str) -> Target {
        let stem = self.path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
        let name = format!("{stem}.{tag}.{}", extension(self.format));
        Target {
            path: self.path.with_file_name(name),
            format: self.format,
        }
    }

    fn prepare(&self) -> Result<(), Failure> {
        if let Some(parent) = self.path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(|e| Failure::Run(format!("cannot create {}: {e}", parent.display())))?;
        }
        Ok(())
    }

    fn write_scan(&self, scan: &ScanResult) -> Result<(), Failure> {
        self.prepare()?;
        match self.format {
            Format::Csv => write_csv(scan, &self.path)?,
            Format::Json => {
                let text = serde_json::to_string_pretty(scan).map_err(|e| Failure::Run(e.to_string()))?;
                fs::write(&self.path, text + "\n")
                    .map_err(|e| Failure::Run(format!("{}: {e}", self.path.display())))?;
            }
            Format::Pgm => return usage("scan results cannot be written as PGM"),
        }
        Ok(())
    }
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Pgm => "pgm",
        Format::Json => "json",
    }
}

// ---------------------------------------------------------------------------
// Presets

enum Setup {
    Photo(PhotodetachmentPreset),
    Laser(AtomLaserPreset),
}

impl Setup {
    fn from_args(p: &Physics, default: PresetName) -> Result<Self, Failure> {
        let setup = match p.preset.unwrap_or(default) {
            PresetName::SMinus | PresetName::OMinus => {
                let mut q = if p.preset.unwrap_or(default) == PresetName::SMinus {
                    PhotodetachmentPreset::s_minus()
                } else {
                    PhotodetachmentPreset::o_minus()
                };
                for (flag, given) in [
                    ("--g", p.g.is_some()),
                    ("--width", p.width.is_some()),
                    ("--omega", p.omega.is_some()),
                    ("--flip-detuning", p.flip_detuning),
                ] {
                    if given {
                        return usage(format!("{flag} applies to the atom-laser preset only"));
                    }
                }
                if let Some(f) = p.field {
                    q.field_ev_per_m = f;
                }
                if let Some(m) = p.mass {
                    q.mass = m;
                }
                if let Some(s) = p.strength {
                    q.strength_sq = s;
                }
                q.validate()?;
                Setup::Photo(q)
            }
            PresetName::RbAtomLaser => {
                let mut q = AtomLaserPreset::rb87();
                if p.field.is_some() || p.strength.is_some() {
                    return usage("--field and --strength apply to the photodetachment presets only");
                }
                if let Some(m) = p.mass {
                    q.mass = m;
                }
                if let Some(g) = p.g {
                    q.g = g;
                }
                if let Some(w) = p.width {
                    q.width = w;
                }
                if let Some(o) = p.omega {
                    q.omega = o;
                    q.family_omega = o;
                }
                q.flip_detuning = p.flip_detuning;
                q.validate()?;
                Setup::Laser(q)
            }
        };
        Ok(setup)
    }

    fn system(&self) -> Result<PhysicalSystem, Failure> {
        Ok(match self {
            Setup::Photo(p) => p.system()?,
            Setup::Laser(p) => p.system()?,
        })
    }

    /// Energy in joules; for the atom laser a frequency is a detuning.
    fn energy(&self, sys: &PhysicalSystem, e: Option<Energy>) -> f64 {
        match (self, e) {
            (Setup::Photo(p), None) => p.energy,
            (Setup::Laser(p), None) => p.energy_of(sys, p.nu_profile),
            (Setup::Laser(p), Some(Energy::Frequency(nu))) => p.energy_of(sys, nu),
            (_, Some(e)) => e.to_joules(HBAR),
        }
    }

    fn z(&self) -> f64 {
        match self {
            Setup::Photo(p) => p.z,
            Setup::Laser(p) => p.z,
        }
    }

    fn source(&self, width: Option<f64>) -> Result<SourceModel, Failure> {
        Ok(match self {
            Setup::Photo(p) => SourceModel::Point(p.source()),
            Setup::Laser(p) => match width {
                Some(w) => SourceModel::Gaussian(GaussianSource::new(w, p.family_omega)?),
                None => SourceModel::Gaussian(p.source()?),
            },
        })
    }

    fn label(&self) -> String {
        match self {
            Setup::Photo(p) => p.species.clone(),
            Setup::Laser(p) => format!("Rb-87 a={:.3}um", p.width * 1e6),
        }
    }
}

fn grid(min: f64, max: f64, n: usize) -> Result<Vec<f64>, Failure> {
    Ok(linspace(min, max, n)?)
}

/// Number of bright rings: local maxima of a profile at non-negative abscissa.
fn ring_count(scan: &ScanResult) -> usize {
    local_maxima(&scan.values)
        .into_iter()
        .filter(|&i| scan.abscissa[i] >= 0.0)
        .count()
        + usize::from(scan.abscissa[0] >= 0.0 && scan.values.len() > 1 && scan.values[0] > scan.values[1])
}

// ---------------------------------------------------------------------------
// Subcommands

pub fn total_current(a: &TotalCurrentArgs, ctx: &Context) -> Result<String, Failure> {
    let setup = Setup::from_args(&a.physics, PresetName::SMinus)?;
    let target = Target::resolve(&a.common, ctx, "total-current", &[Format::Csv, Format::Json])?;
    let sys = setup.system()?;
    match &setup {
        Setup::Photo(p) => {
            if a.numin.is_some() || a.numax.is_some() || a.overlay {
                return usage("--numin/--numax/--overlay apply to the atom-laser preset; use --emin/--emax");
            }
            let emin = a.emin.map_or(p.e_min, |e| e.to_joules(HBAR));
            let emax = a.emax.map_or(p.e_max, |e| e.to_joules(HBAR));
            let mut scan = photodetachment_cross_section(p, &grid(emin, emax, a.n)?)?;
            scan.push_meta("command", ctx.command_line.as_str());
            target.write_scan(&scan)?;
            let (i, peak) = argmax(&scan.values);
            Ok(format!(
                "total-current {}: {} points, peak J = {peak:.6e} /s at {:.3} ueV -> {}",
                setup.label(),
                scan.len(),
                scan.abscissa[i],
                target.path.display()
            ))
        }
        Setup::Laser(p) => {
            if a.emin.is_some() || a.emax.is_some() {
                return usage("the atom-laser preset scans detuning; use --numin/--numax");
            }
            let src = p.source()?;
            let nus = grid(a.numin.unwrap_or(p.nu_min), a.numax.unwrap_or(p.nu_max), a.n)?;
            let (mut exact, mut slicing) = total_current_scan(&sys, p, &src, &nus)?;
            let (e0, e1) = (p.energy_of(&sys, nus[0]), p.energy_of(&sys, nus[nus.len() - 1]));
            let (lhs, rhs) = sum_rule_check(&sys, &SourceModel::Gaussian(src), (e0.min(e1), e0.max(e1)), 1e-6)?;
            let ratio = lhs / rhs;
            for s in [&mut exact, &mut slicing] {
                s.push_meta("sum_rule_ratio", ratio);
                s.push_meta("command", ctx.command_line.as_str());
            }
            target.write_scan(&exact)?;
            if a.overlay {
                target.sibling("overlay").write_scan(&slicing)?;
            }
            let (i, peak) = argmax(&exact.values);
            Ok(format!(
                "total-current {}: peak J = {peak:.6e} /s at {:.1} Hz (slicing peak 0 Hz, virtual threshold {} Hz), sum-rule ratio {ratio:.6} -> {}",
                setup.label(),
                exact.abscissa[i],
                exact.meta("virtual_threshold_Hz").unwrap_or("?"),
                target.path.display()
            ))
        }
    }
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter().copied().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |best, (i, x)| if x > best.1 { (i, x) } else { best },
    )
}

pub fn density_profile(a: &ProfileArgs, ctx: &Context) -> Result<String, Failure> {
    let setup = Setup::from_args(&a.physics, PresetName::OMinus)?;
    let target = Target::resolve(&a.common, ctx, "density-profile", &[Format::Csv, Format::Json])?;
    let sys = setup.system()?;
    let energy = setup.energy(&sys, a.energy);
    let z = a.z.unwrap_or(setup.z());
    let widths: Vec<Option<f64>> = match (&a.widths, &setup) {
        (None, _) => vec![None],
        (Some(w), Setup::Laser(_)) => w.0.iter().map(|&x| Some(x)).collect(),
        (Some(_), Setup::Photo(_)) => return usage("--widths applies to the atom-laser preset only"),
    };
    let mut parts = Vec::new();
    for w in &widths {
        let src = setup.source(*w)?;
        let half = a
            .half_width
            .unwrap_or_else(|| default_lateral_extent(&sys, &src, energy, z));
        let mut scan = if a.radial {
            radial_profile(&sys, &src, energy, z, half, a.n)?
        } else {
            lateral_profile(&sys, &src, energy, z, half, a.n)?
        };
        if let SourceModel::Gaussian(g) = src {
            scan.push_meta("width_m", g.width());
            scan.push_meta("omega_rad_per_s", g.omega());
            scan.push_meta("alpha", g.alpha(&sys));
        }
        scan.push_meta("command", ctx.command_line.as_str());
        let out = match w {
            Some(w) => target.sibling(&format!("a{:.0}nm", w * 1e9)),
            None => Target {
                path: target.path.clone(),
                format: target.format,
            },
        };
        out.write_scan(&scan)?;
        let rings = ring_count(&scan);
        parts.push(match w {
            Some(w) => format!("a={:.2}um: {rings} rings", w * 1e6),
            None => format!("{rings} rings, peak j = {:.6e}", argmax(&scan.values).1),
        });
    }
    Ok(format!(
        "density-profile {} at z = {z} m: {} -> {}",
        setup.label(),
        parts.join(", "),
        target.path.display()
    ))
}

pub fn image(a: &ImageArgs, ctx: &Context) -> Result<String, Failure> {
    let setup = Setup::from_args(&a.physics, PresetName::OMinus)?;
    let target = Target::resolve(&a.common, ctx, "detector-image", &[Format::Pgm])?;
    let sys = setup.system()?;
    let energy = setup.energy(&sys, a.energy);
    let z = a.z.unwrap_or(setup.z());
    let src = setup.source(None)?;
    let half = a
        .half_width
        .unwrap_or_else(|| default_lateral_extent(&sys, &src, energy, z));
    let mut img = detector_image(&sys, &src, energy, z, half, a.n)?;
    img.push_meta("command", ctx.command_line.as_str());
    target.prepare()?;
    write_pgm(&img, &target.path)?;
    // Rings along the centre row, from the axis outwards.
    let row = a.n / 2;
    let line: Vec<f64> = (row..a.n).map(|c| img.get(c, row)).collect();
    let rings = local_maxima(&line).len() + usize::from(line.len() > 1 && line[0] > line[1]);
    Ok(format!(
        "detector-image {}: {}x{} px over ±{half:.4e} m at z = {z} m, E = {:.3} ueV, max j = {:.6e}, {rings} rings -> {}",
        setup.label(),
        a.n,
        a.n,
        energy / MICRO_EV,
        img.max_value(),
        target.path.display()
    ))
}

pub fn atom_laser(a: &AtomLaserArgs, ctx: &Context) -> Result<String, Failure> {
    let mut p = match Setup::from_args(&a.physics, PresetName::RbAtomLaser)? {
        Setup::Laser(p) => p,
        Setup::Photo(_) => return usage("atom-laser needs the rb-atom-laser preset"),
    };
    if let Some(t) = a.time {
        p.time = t;
    }
    if let Some(n0) = a.n0 {
        p.n0 = n0;
    }
    p.validate()?;
    let target = Target::resolve(&a.common, ctx, "atom-laser", &[Format::Csv, Format::Json])?;
    let nus = grid(a.numin.unwrap_or(p.nu_min), a.numax.unwrap_or(p.nu_max), a.n)?;
    let curve = atom_laser_depletion(&p, &nus)?;
    let mut scan = curve.to_scan(&p)?;
    scan.push_meta("command", ctx.command_line.as_str());
    target.write_scan(&scan)?;
    let (i, _) = argmax(&scan.values.iter().map(|v| -v).collect::<Vec<_>>());
    let (k, jmax) = argmax(&curve.current);
    Ok(format!(
        "atom-laser: minimum {:.6e} atoms remaining at {:.1} Hz (peak J = {jmax:.6e} /s at {:.1} Hz) -> {}",
        scan.values[i],
        scan.abscissa[i],
        curve.detuning_hz[k],
        target.path.display()
    ))
}

pub fn transition(a: &TransitionArgs, ctx: &Context) -> Result<String, Failure> {
    let p = match Setup::from_args(&a.physics, PresetName::RbAtomLaser)? {
        Setup::Laser(p) => p,
        Setup::Photo(_) => return usage("transition needs the rb-atom-laser preset"),
    };
    let target = Target::resolve(&a.common, ctx, "transition", &[Format::Csv, Format::Json])?;
    let widths = a
        .widths
        .as_ref()
        .map_or_else(|| p.transition_widths.clone(), |w| w.0.clone());
    let nus = grid(
        a.numin.unwrap_or(p.transition_nu.0),
        a.numax.unwrap_or(p.transition_nu.1),
        a.n,
    )?;
    let mut entries = current_transition_scan(&p, &widths, &nus)?;
    for e in &mut entries {
        for s in [&mut e.exact, &mut e.slicing] {
            s.push_meta("deviation", e.deviation);
            s.push_meta("maxima", e.maxima);
            s.push_meta("area", e.area);
            s.push_meta("command", ctx.command_line.as_str());
        }
    }
    match target.format {
        Format::Json => {
            let doc: Vec<serde_json::Value> = entries
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "width_m": e.width,
                        "alpha": e.alpha,
                        "deviation": e.deviation,
                        "maxima": e.maxima,
                        "area": e.area,
                        "exact": e.exact,
                        "slicing": e.slicing,
                    })
                })
                .collect();
            target.prepare()?;
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Run(e.to_string()))?;
            fs::write(&target.path, text + "\n")
                .map_err(|e| Failure::Run(format!("{}: {e}", target.path.display())))?;
        }
        _ => {
            for e in &entries {
                let tag = format!("a{:.0}nm", e.width * 1e9);
                target.sibling(&format!("{tag}.exact")).write_scan(&e.exact)?;
                target.sibling(&format!("{tag}.slicing")).write_scan(&e.slicing)?;
            }
        }
    }
    let mean = entries.iter().map(|e| e.area).sum::<f64>() / entries.len() as f64;
    let spread = entries.iter().map(|e| (e.area / mean - 1.0).abs()).fold(0.0, f64::max);
    let parts: Vec<String> = entries
        .iter()
        .map(|e| format!("a={:.2}um dev={:.3} maxima={}", e.width * 1e6, e.deviation, e.maxima))
        .collect();
    Ok(format!(
        "transition: {}; area spread {spread:.2e} -> {}",
        parts.join(", "),
        target.path.display()
    ))
}
