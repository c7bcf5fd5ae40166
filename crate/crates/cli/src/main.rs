mod canon;

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use metrifract::cantor::{
    build_system, measure_account, parse_rational, random_code_pairs, shift_fit, verify_modulus,
    DiscreteMeasure, MeasureAccount, ModulusReport, ShiftFit, DEFAULT_DEPTH,
};
use metrifract::covering::{nonexploding_profile, CoveringProfile};
use metrifract::curves::{
    hilbert_cell_coverage, hilbert_curve, hilbert_modulus, interleave_cell_coverage,
    interleave_map, interleave_modulus, InterleaveModulus,
};
use metrifract::embedding::{distortion_report, embed_cloud, DistortionReport};
use metrifract::gauge::{
    hat_transform, hat_transform_unchecked, ord_estimate, remetrize, Gauge, HatReport,
    OrdEstimate, Remetrized, DEFAULT_DECADES,
};
use metrifract::holder::{mcshane_extend, Extension, ModulusFit, SampledMap};
use metrifract::metric::{PointCloud, TorusPoint};
use metrifract::pipeline::{pipeline_map_onto_cube, PipelineParams, PipelineReport};
use metrifract::schedule::{GSpec, SlowSchedule};
use metrifract::selfsimilar::{
    attractor_points, box_dimension, chaos_game, dyadic_radii, hausdorff_premeasure_upper,
    moran_dimension, osc_check, BoxDimension, Ifs, OscReport, PremeasureBound,
};
use metrifract::{Error, Result};

#[derive(Parser)]
#[command(name = "metrifract", version, about = "Finite-scale metric geometry toolkit")]
struct Cli {
    /// Output directory; METRIFRACT_OUT takes precedence.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for data-parallel loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// CSV of coordinates, one point per row, no header.
    #[arg(long)]
    points: Option<PathBuf>,
    /// CSV distance matrix, no header.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct OptionalInput {
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Args)]
struct SystemArgs {
    /// Exact rational, `p/q` or a finite decimal.
    #[arg(long, default_value = "1/10")]
    epsilon: String,
    /// `const:g`, `poly:c,d` or `list:g0,g1,...`.
    #[arg(long = "G", default_value = "poly:1,1")]
    g: String,
    #[arg(long, default_value_t = 6)]
    nmax: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveKind {
    Hilbert,
    Interleave,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Cantor,
    Sierpinski,
    Square,
}

#[derive(Args)]
struct IfsSource {
    /// IFS JSON file.
    #[arg(long, conflicts_with = "preset")]
    ifs: Option<PathBuf>,
    #[arg(long)]
    preset: Option<Preset>,
    /// Accept general orthogonal matrices (OSC becomes conservative).
    #[arg(long)]
    general: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Covering profile: G(n) and local cover counts per scale.
    Profile {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0)]
        nmin: usize,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    /// Embed a cloud in the weighted torus and check its distortion.
    Embed {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 0)]
        nmin: usize,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Build a Cantor system, account for its measure, verify the coding map.
    Cantor {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Number of random code pairs to verify.
        #[arg(long, default_value_t = 1000)]
        verify: usize,
    },
    /// Fit a dyadic shift putting a measure inside a Cantor system.
    Shift {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        /// Haar-uniform atoms, unless --points supplies torus points.
        #[arg(long, default_value_t = 1000)]
        atoms: usize,
        #[arg(long)]
        points: Option<PathBuf>,
        /// Shift grid depth.
        #[arg(long, default_value_t = 6)]
        grid: usize,
    },
    /// Gauge order, hat transform and optional remetrization.
    Gauge {
        /// `pow:β`, `logpow:β,γ` or `table:path.csv`.
        #[arg(long)]
        gauge: String,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_DECADES)]
        decades: usize,
        /// Skip the β ≤ ord h precondition.
        #[arg(long)]
        unchecked: bool,
        #[command(flatten)]
        input: OptionalInput,
    },
    /// McShane extension of anchor values to every point.
    Extend {
        #[command(flatten)]
        input: Input,
        /// CSV rows `index,v1,...,vm`.
        #[arg(long)]
        anchors: PathBuf,
        #[arg(long)]
        gauge: String,
    },
    /// Stream a space-filling map as CSV on stdout.
    Curve {
        #[arg(long, value_enum, default_value = "hilbert")]
        kind: CurveKind,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Hilbert order.
        #[arg(long, default_value_t = 6)]
        order: u32,
        /// Interleave precision in binary digits.
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Parameter samples to stream (n = 1).
        #[arg(long, default_value_t = 1025)]
        samples: usize,
        /// Random pairs for the modulus fit.
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
    },
    /// Similarity dimension, open set condition and attractor samples.
    Ifs {
        #[command(flatten)]
        source: IfsSource,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Also write a chaos-game sample of this size.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Box-counting dimension and a Hausdorff pre-measure upper bound.
    Dimension {
        #[arg(long)]
        points: Option<PathBuf>,
        #[command(flatten)]
        source: IfsSource,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        rmin: u32,
        #[arg(long, default_value_t = 7)]
        rmax: u32,
        #[arg(long)]
        gauge: Option<String>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Map a cloud onto [0,1]^m through the torus, a Cantor system and a curve.
    Pipeline {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = 6)]
        grid: usize,
        #[arg(long)]
        gauge: Option<String>,
    },
}

fn load_cloud(points: &Option<PathBuf>, matrix: &Option<PathBuf>) -> Result<Option<PointCloud>> {
    match (points, matrix) {
        (Some(p), _) => Ok(Some(PointCloud::read_points_csv(File::open(p)?)?)),
        (None, Some(m)) => Ok(Some(PointCloud::read_matrix_csv(File::open(m)?)?)),
        (None, None) => Ok(None),
    }
}

impl Input {
    fn load(&self) -> Result<PointCloud> {
        load_cloud(&self.points, &self.matrix)?
            .ok_or_else(|| Error::Parse("one of --points or --matrix is required".into()))
    }
}

impl SystemArgs {
    fn schedule(&self) -> Result<SlowSchedule> {
        SlowSchedule::new(self.g.parse::<GSpec>()?, self.nmax)
    }
}

impl IfsSource {
    fn load(&self) -> Result<Option<Ifs>> {
        match (&self.ifs, self.preset) {
            (Some(path), _) => Ok(Some(Ifs::from_json(&fs::read_to_string(path)?, self.general)?)),
            (None, Some(Preset::Cantor)) => Ok(Some(Ifs::cantor_ternary())),
            (None, Some(Preset::Sierpinski)) => Ok(Some(Ifs::sierpinski())),
            (None, Some(Preset::Square)) => Ok(Some(Ifs::cube(2)?)),
            (None, None) => Ok(None),
        }
    }
}

struct Output {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Output {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Output {
            dir,
            written: Vec::new(),
        })
    }

    /// Canonical JSON; a non-finite number anywhere rejects the report.
    fn report<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let text = canon::to_canonical_json(value).map_err(Error::Rejected)?;
        self.write(&format!("{name}.json"), &text)
    }

    fn write(&mut self, file: &str, text: &str) -> Result<()> {
        let path = self.dir.join(file);
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }
}

fn csv_rows<'a>(header: &str, rows: impl IntoIterator<Item = &'a Vec<f64>>) -> String {
    let mut out = format!("{header}\n");
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| canon::format_g17(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn numbered_header(prefix: &str, count: usize) -> String {
    (1..=count).map(|i| format!("{prefix}{i}")).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct EmbedReport<'a> {
    diameter: f64,
    schedule: &'a SlowSchedule,
    colors_used: Vec<usize>,
    distortion: DistortionReport,
}

#[derive(Serialize)]
struct CantorReport {
    epsilon: String,
    schedule: SlowSchedule,
    depth: usize,
    coordinates: usize,
    measure: MeasureAccount,
    modulus: ModulusReport,
}

#[derive(Serialize)]
struct ShiftReport {
    epsilon: String,
    schedule: SlowSchedule,
    depth: usize,
    atoms: usize,
    truncation_slack: f64,
    target: f64,
    fit: ShiftFit,
    captured_fraction: f64,
}

#[derive(Serialize)]
struct GaugeReport {
    gauge: Gauge,
    ord: OrdEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    hat: Option<HatReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    remetrized: Option<Remetrized>,
}

#[derive(Serialize)]
struct CurveReport {
    kind: &'static str,
    m: usize,
    n: usize,
    order: Option<u32>,
    precision: Option<usize>,
    cells_hit: usize,
    cells_total: usize,
    modulus: Option<ModulusFit>,
    off_mesh_modulus: Option<InterleaveModulus>,
}

#[derive(Serialize)]
struct IfsReport {
    ifs: Ifs,
    moran_dimension: f64,
    moran_residual: f64,
    osc: Option<OscReport>,
    depth: usize,
    sample_points: usize,
    chaos_points: Option<usize>,
}

#[derive(Serialize)]
struct DimensionReport {
    points: usize,
    box_dimension: BoxDimension,
    #[serde(skip_serializing_if = "Option::is_none")]
    moran_dimension: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    premeasure: Option<PremeasureBound>,
}

fn run(cli: Cli, out_dir: PathBuf) -> Result<Vec<PathBuf>> {
    let mut out = Output::new(out_dir)?;
    match cli.command {
        Command::Profile { input, nmin, nmax } => {
            let (cloud, _) = input.load()?.normalized();
            let profile: CoveringProfile = nonexploding_profile(&cloud, nmin..=nmax);
            out.report("profile", &profile)?;
            out.write("profile.csv", &profile.csv())?;
        }
        Command::Embed { input, nmin, nmax } => {
            let (cloud, diameter) = input.load()?.normalized();
            let emb = embed_cloud(&cloud, nmin, nmax)?;
            let distortion = distortion_report(&cloud, &emb)?;
            let report = EmbedReport {
                diameter,
                schedule: &emb.schedule,
                colors_used: emb.stages.iter().map(|s| s.colors_used()).collect(),
                distortion,
            };
            out.report("embed", &report)?;
            let images: Vec<Vec<f64>> = emb.images.iter().map(|p| p.coords().to_vec()).collect();
            out.write(
                "embed_images.csv",
                &csv_rows(&numbered_header("t", emb.schedule.coords()), &images),
            )?;
        }
        Command::Cantor {
            system,
            depth,
            verify,
        } => {
            let eps = parse_rational(&system.epsilon)?;
            let sys = build_system(eps.clone(), system.schedule()?, depth)?;
            let pairs = random_code_pairs(&sys, verify, cli.seed);
            let report = CantorReport {
                epsilon: eps.to_string(),
                schedule: sys.schedule().clone(),
                depth,
                coordinates: sys.schedule().coords(),
                measure: measure_account(&sys),
                modulus: verify_modulus(&sys, &pairs)?,
            };
            out.report("cantor", &report)?;
        }
        Command::Shift {
            system,
            depth,
            atoms,
            points,
            grid,
        } => {
            let eps = parse_rational(&system.epsilon)?;
            let sys = build_system(eps.clone(), system.schedule()?, depth)?;
            let mu = match points {
                Some(path) => {
                    let cloud = PointCloud::read_points_csv(File::open(path)?)?;
                    let atoms = cloud
                        .points()
                        .iter()
                        .map(|p| TorusPoint::new(p.clone()).map(|t| (t, 1.0)))
                        .collect::<Result<Vec<_>>>()?;
                    DiscreteMeasure::new(atoms)?
                }
                None => DiscreteMeasure::haar_uniform(sys.schedule().coords(), atoms, cli.seed),
            };
            let account = measure_account(&sys);
            let fit = shift_fit(&sys, &mu, grid)?;
            let eps_f = account.one_minus_eps;
            let report = ShiftReport {
                epsilon: eps.to_string(),
                schedule: sys.schedule().clone(),
                depth,
                atoms: mu.atoms.len(),
                truncation_slack: account.truncation_slack,
                target: eps_f - account.truncation_slack,
                captured_fraction: fit.captured_fraction(),
                fit,
            };
            out.report("shift", &report)?;
        }
        Command::Gauge {
            gauge,
            beta,
            decades,
            unchecked,
            input,
        } => {
            let h: Gauge = gauge.parse()?;
            let ord = ord_estimate(&h, decades)?;
            let hat = match beta {
                Some(b) if unchecked => Some(hat_transform_unchecked(&h, b, decades)?),
                Some(b) => Some(hat_transform(&h, b, decades)?),
                None => None,
            };
            let remetrized = match load_cloud(&input.points, &input.matrix)? {
                Some(cloud) => Some(remetrize(&cloud, &h)?),
                None => None,
            };
            if let Some(hat) = &hat {
                let rows: Vec<Vec<f64>> = metrifract::gauge::geometric_grid(decades)
                    .into_iter()
                    .rev()
                    .map(|r| vec![r, h.evaluate(r).unwrap_or(f64::NAN), hat.hat.evaluate(r).unwrap_or(f64::NAN)])
                    .collect();
                out.write("hat_series.csv", &csv_rows("r,h,hat", &rows))?;
            }
            if let Some(rem) = &remetrized {
                out.write("remetrized.csv", &csv_rows_plain(&rem.cloud.distance_matrix()))?;
            }
            out.report(
                "gauge",
                &GaugeReport {
                    gauge: h,
                    ord,
                    hat,
                    remetrized,
                },
            )?;
        }
        Command::Extend {
            input,
            anchors,
            gauge,
        } => {
            let cloud = input.load()?;
            let h: Gauge = gauge.parse()?;
            let map = read_anchors(&anchors)?;
            let all: Vec<usize> = (0..cloud.len()).collect();
            let ext: Extension = mcshane_extend(&map, &h, &cloud, &all)?;
            out.write(
                "extend.csv",
                &csv_rows(&numbered_header("f", map.target_dim()), &ext.values),
            )?;
            out.report("extend", &ext)?;
        }
        Command::Curve {
            kind,
            m,
            n,
            order,
            depth,
            samples,
            pairs,
        } => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            let report = match kind {
                CurveKind::Hilbert => {
                    if n != 1 {
                        return Err(Error::Domain("Hilbert curves take n = 1".into()));
                    }
                    let (hit, total) = hilbert_cell_coverage(m, order)?;
                    let modulus = if pairs > 0 {
                        Some(hilbert_modulus(m, order, pairs, cli.seed)?)
                    } else {
                        None
                    };
                    writeln!(lock, "t,{}", numbered_header("x", m))?;
                    for i in 0..samples {
                        let t = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
                        write_row(&mut lock, t, &hilbert_curve(m, order, t)?)?;
                    }
                    CurveReport {
                        kind: "hilbert",
                        m,
                        n,
                        order: Some(order),
                        precision: None,
                        cells_hit: hit,
                        cells_total: total,
                        modulus,
                        off_mesh_modulus: None,
                    }
                }
                CurveKind::Interleave => {
                    let (hit, total) = interleave_cell_coverage(n, m, depth)?;
                    let off_mesh = if n == 1 && pairs > 0 {
                        Some(interleave_modulus(m, depth, pairs, cli.seed)?)
                    } else {
                        None
                    };
                    if n == 1 {
                        writeln!(lock, "t,{}", numbered_header("x", m))?;
                        for i in 0..samples {
                            let t = if samples == 1 { 0.0 } else { i as f64 / (samples - 1) as f64 };
                            write_row(&mut lock, t, &interleave_map(&[t], m, depth)?)?;
                        }
                    } else {
                        writeln!(lock, "{},{}", numbered_header("u", n), numbered_header("x", m))?;
                        let side = 1usize << depth;
                        for code in 0..side.pow(n as u32) {
                            let u: Vec<f64> = (0..n)
                                .map(|i| ((code / side.pow(i as u32)) % side) as f64 / side as f64)
                                .collect();
                            let x = interleave_map(&u, m, depth)?;
                            let cells: Vec<String> = u.iter().chain(&x).map(|v| canon::format_g17(*v)).collect();
                            writeln!(lock, "{}", cells.join(","))?;
                        }
                    }
                    CurveReport {
                        kind: "interleave",
                        m,
                        n,
                        order: None,
                        precision: Some(depth),
                        cells_hit: hit,
                        cells_total: total,
                        modulus: None,
                        off_mesh_modulus: off_mesh,
                    }
                }
            };
            lock.flush()?;
            out.report("curve", &report)?;
        }
        Command::Ifs {
            source,
            depth,
            sample,
        } => {
            let ifs = source
                .load()?
                .ok_or_else(|| Error::Parse("one of --ifs or --preset is required".into()))?;
            let s = moran_dimension(&ifs);
            let residual = ifs.ratios().iter().map(|c| c.powf(s)).sum::<f64>() - 1.0;
            let osc = ifs.open_set.as_ref().map(|b| osc_check(&ifs, b)).transpose()?;
            let att = attractor_points(&ifs, depth)?;
            let header = numbered_header("x", ifs.dim);
            out.write("attractor.csv", &csv_rows(&header, &att.points))?;
            if let Some(count) = sample {
                let pts = chaos_game(&ifs, count, 64, cli.seed);
                out.write("chaos.csv", &csv_rows(&header, &pts))?;
            }
            let report = IfsReport {
                moran_dimension: s,
                moran_residual: residual,
                osc,
                depth,
                sample_points: att.points.len(),
                chaos_points: sample,
                ifs,
            };
            out.report("ifs", &report)?;
        }
        Command::Dimension {
            points,
            source,
            depth,
            rmin,
            rmax,
            gauge,
            delta,
        } => {
            let ifs = source.load()?;
            let pts: Vec<Vec<f64>> = match (&points, &ifs) {
                (Some(path), _) => PointCloud::read_points_csv(File::open(path)?)?.points().to_vec(),
                (None, Some(ifs)) => attractor_points(ifs, depth)?.points,
                (None, None) => {
                    return Err(Error::Parse("one of --points, --ifs or --preset is required".into()))
                }
            };
            if rmin >= rmax {
                return Err(Error::Domain(format!("--rmin {rmin} must be below --rmax {rmax}")));
            }
            let bd = box_dimension(&pts, &dyadic_radii(rmin, rmax))?;
            let premeasure = match (gauge, delta) {
                (Some(g), Some(d)) => {
                    let cloud = PointCloud::from_points(pts.clone())?;
                    Some(hausdorff_premeasure_upper(&cloud, &g.parse()?, d)?)
                }
                (None, None) => None,
                _ => return Err(Error::Parse("--gauge and --delta go together".into())),
            };
            out.write("box_series.csv", &bd.csv())?;
            out.report(
                "dimension",
                &DimensionReport {
                    points: pts.len(),
                    box_dimension: bd,
                    moran_dimension: if points.is_none() { ifs.as_ref().map(moran_dimension) } else { None },
                    premeasure,
                },
            )?;
        }
        Command::Pipeline {
            input,
            m,
            nmax,
            epsilon,
            depth,
            grid,
            gauge,
        } => {
            let cloud = input.load()?;
            let params = PipelineParams {
                m,
                n_max: nmax,
                epsilon: parse_rational(&epsilon)?,
                depth,
                grid_depth: grid,
                gauge: gauge.map(|g| g.parse()).transpose()?,
                ..Default::default()
            };
            let report: PipelineReport = pipeline_map_onto_cube(&cloud, &params)?;
            out.write(
                "pipeline_image.csv",
                &csv_rows(&numbered_header("y", m), &report.image),
            )?;
            out.report("pipeline", &report)?;
        }
    }
    Ok(out.written)
}

fn csv_rows_plain(rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| canon::format_g17(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn write_row(w: &mut impl Write, t: f64, x: &[f64]) -> io::Result<()> {
    let cells: Vec<String> = std::iter::once(t).chain(x.iter().copied()).map(canon::format_g17).collect();
    writeln!(w, "{}", cells.join(","))
}

fn read_anchors(path: &Path) -> Result<SampledMap> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(Error::Csv)?;
    let mut anchors = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(Error::Csv)?;
        let mut fields = rec.iter();
        let idx = fields
            .next()
            .and_then(|f| f.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("anchor row `{}` lacks an index", rec.iter().collect::<Vec<_>>().join(","))))?;
        let values = fields
            .map(|f| f.parse::<f64>().map_err(|_| Error::Parse(format!("bad anchor value `{f}`"))))
            .collect::<Result<Vec<_>>>()?;
        anchors.push((idx, values));
    }
    SampledMap::new(anchors)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = std::env::var_os("METRIFRACT_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| cli.out.clone());
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("metrifract: --threads {threads}: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli, out_dir) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("metrifract: {e}");
            ExitCode::from(if e.is_rejection() { 1 } else { 2 })
        }
    }
}
