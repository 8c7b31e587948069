use std::path::{Path, PathBuf};
use std::time::Instant;

use diracspec::bari::{bari_criterion, selfadjoint_check, SeriesTail};
use diracspec::boundary::{classify, BoundaryConditions};
use diracspec::fourier::{bessel_sum, fourier, maximal_fourier};
use diracspec::gridfn::{TriangularKernel, XFamily};
use diracspec::ode::DiracSystem;
use diracspec::spectrum::{zeros_delta0, zeros_delta_q, SpectrumOptions};
use diracspec::stability::{run_ball_experiment, ExperimentOptions, PotentialBallSampler};
use diracspec::transformop::{write_kernel, KernelSet, SolveOptions};
use serde_json::{json, Value};

use crate::config::{Entry, ExperimentConfig, Task};
use crate::output::{complex, opt_real, real, row, sha256_hex, Artifact};
use crate::Failure;

pub const TOOL: &str = "diracspec";

/// What a successful run left on disk.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub manifest_hash: String,
    pub files: Vec<String>,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    base: &'a Path,
    hash: &'a str,
}

impl Context<'_> {
    fn bc(&self) -> Result<BoundaryConditions<f64>, Failure> {
        self.cfg.boundary_conditions()
    }

    fn system(&self) -> Result<DiracSystem<f64>, Failure> {
        self.cfg.load_system(self.base)
    }

    fn solve(&self) -> SolveOptions<f64> {
        SolveOptions {
            max_iter: self.cfg.solver.max_iter,
            tol: self.cfg.solver.tol,
        }
    }

    fn spectrum(&self) -> SpectrumOptions<f64> {
        SpectrumOptions {
            grid: self.cfg.system.grid,
            eps_ladder: self.cfg.spectrum.eps_ladder.clone(),
            contour_nodes: self.cfg.spectrum.contour_nodes,
            newton_max_iter: self.cfg.spectrum.newton_max_iter,
        }
    }

    fn b(&self) -> (f64, f64) {
        (self.cfg.system.b1, self.cfg.system.b2)
    }
}

/// Hash identifying a run: SHA-256 of the canonical JSON of tool, version, task and config.
pub fn manifest_hash(task: Task, cfg: &ExperimentConfig) -> String {
    let echo = json!({
        "tool": TOOL,
        "version": diracspec::VERSION,
        "task": task.as_str(),
        "config": cfg,
    });
    sha256_hex(serde_json::to_string(&echo).expect("config serializes").as_bytes())
}

/// Runs `task` on the config at `config_path`, writing into `out` (or the
/// config's own `out`, or `diracspec-<task>` in the working directory).
pub fn run(task: Task, config_path: &Path, out: Option<&Path>) -> Result<RunSummary, Failure> {
    let started = Instant::now();
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| Failure::Io(format!("cannot read config {}: {e}", config_path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    if let Some(t) = cfg.task {
        if t != task {
            return Err(Failure::Config(format!(
                "config is for task {} but {} was requested",
                t.as_str(),
                task.as_str()
            )));
        }
    }
    let base = config_path.parent().unwrap_or(Path::new("."));
    let out_dir = match (out, &cfg.out) {
        (Some(dir), _) => dir.to_path_buf(),
        (None, Some(dir)) => base.join(dir),
        (None, None) => PathBuf::from(format!("{TOOL}-{}", task.as_str())),
    };
    let hash = manifest_hash(task, &cfg);
    let ctx = Context {
        cfg: &cfg,
        base,
        hash: &hash,
    };
    let parsed = started.elapsed();

    let compute_start = Instant::now();
    let artifacts = match task {
        Task::Classify => classify_task(&ctx)?,
        Task::Spectrum => spectrum_task(&ctx)?,
        Task::Kernels => kernels_task(&ctx)?,
        Task::Stability => stability_task(&ctx)?,
        Task::Bari => bari_task(&ctx)?,
        Task::Fourier => fourier_task(&ctx)?,
    };
    let computed = compute_start.elapsed();

    let write_start = Instant::now();
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Io(format!("cannot create output directory {}: {e}", out_dir.display())))?;
    for a in &artifacts {
        write_file(&out_dir.join(&a.name), &a.bytes)?;
    }
    let written = write_start.elapsed();

    let outputs: Vec<Value> = artifacts
        .iter()
        .map(|a| json!({"file": a.name, "sha256": a.sha256(), "bytes": a.bytes.len()}))
        .collect();
    let manifest = json!({
        "tool": TOOL,
        "version": diracspec::VERSION,
        "task": task.as_str(),
        "hash": hash,
        "config": cfg,
        "outputs": outputs,
        "threads": rayon::current_num_threads(),
        "timings_ms": {
            "parse": parsed.as_secs_f64() * 1e3,
            "compute": computed.as_secs_f64() * 1e3,
            "write": written.as_secs_f64() * 1e3,
        },
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(&out_dir.join("manifest.json"), text.as_bytes())?;

    let mut files: Vec<String> = artifacts.into_iter().map(|a| a.name).collect();
    files.push("manifest.json".into());
    Ok(RunSummary {
        out_dir,
        manifest_hash: hash,
        files,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn classify_task(ctx: &Context) -> Result<Vec<Artifact>, Failure> {
    let bc = ctx.bc()?;
    let (b1, b2) = ctx.b();
    let v = classify(&bc, b1, b2, None);
    let canonical = bc.canonicalize().ok();
    let body = json!({
        "kind": v.kind.as_str(),
        "reason": v.reason,
        "ratio": v.ratio.map(|(n1, n2)| json!([n1, n2])),
        "ratio_source": v.ratio_source.as_str(),
        "regular": v.is_regular(),
        "strictly_regular": v.is_strictly_regular(),
        "canonical": canonical.map(|c| json!({
            "a": complex(c.a), "b": complex(c.b), "c": complex(c.c), "d": complex(c.d),
        })),
        "selfadjoint": canonical.map(|c| selfadjoint_check(&c, b1, b2)),
    });
    Ok(vec![Artifact::json("classify.json", ctx.hash, body)])
}

fn spectrum_task(ctx: &Context) -> Result<Vec<Artifact>, Failure> {
    let sys = ctx.system()?;
    let bc = ctx.bc()?;
    let w = zeros_delta_q(&sys, &bc, ctx.cfg.n_max, &ctx.spectrum())?;
    let mut csv = String::from("n,re_lambda0,im_lambda0,re_lambda,im_lambda,multiplicity,ladder_eps,method\n");
    for e in &w.entries {
        csv.push_str(&row(&[
            e.n.to_string(),
            e.lambda0.re.to_string(),
            e.lambda0.im.to_string(),
            e.lambda.re.to_string(),
            e.lambda.im.to_string(),
            e.multiplicity.to_string(),
            e.ladder_eps.map(|v| v.to_string()).unwrap_or_default(),
            e.method.as_str().to_string(),
        ]));
    }
    let max_dev = w
        .entries
        .iter()
        .map(|e| (e.lambda - e.lambda0).norm())
        .fold(0.0, f64::max);
    let body = json!({
        "n_max": w.n_max,
        "count": w.entries.len(),
        "strip_height": real(w.strip_height),
        "head": w.head(),
        "tail_start": w.tail_start(),
        "max_deviation": real(max_dev),
    });
    Ok(vec![
        Artifact::csv("spectrum.csv", ctx.hash, &csv),
        Artifact::json("spectrum.json", ctx.hash, body),
    ])
}

fn kernel_bytes(k: &TriangularKernel<f64>) -> Result<Vec<u8>, Failure> {
    let mut bytes = Vec::new();
    write_kernel(k, &mut bytes).map_err(|e| Failure::Io(format!("cannot encode kernel: {e}")))?;
    Ok(bytes)
}

fn kernels_task(ctx: &Context) -> Result<Vec<Artifact>, Failure> {
    let sys = ctx.system()?;
    let n = ctx.cfg.kernels.grid;
    let ks = KernelSet::build(&sys, n, ctx.solve())?;
    let p = ctx.cfg.p_norm();
    let stride = ctx.cfg.kernels.stride;
    let names = ["11", "12", "21", "22"];
    let mut header = vec!["x".to_string(), "t".to_string()];
    for sign in ["plus", "minus"] {
        for e in names {
            header.push(format!("re_k{sign}_{e}"));
            header.push(format!("im_k{sign}_{e}"));
        }
    }
    let mut csv = row(&header);
    let h = 1.0 / n as f64;
    let nodes: Vec<usize> = (0..=n).step_by(stride).chain((n % stride != 0).then_some(n)).collect();
    for &i in &nodes {
        for &j in nodes.iter().filter(|&&j| j <= i) {
            let mut cells = vec![(i as f64 * h).to_string(), (j as f64 * h).to_string()];
            for k in [&ks.k_plus, &ks.k_minus] {
                let m = k.get(i, j).m;
                for v in [m[0][0], m[0][1], m[1][0], m[1][1]] {
                    cells.push(v.re.to_string());
                    cells.push(v.im.to_string());
                }
            }
            csv.push_str(&row(&cells));
        }
    }
    let norms = |k: &TriangularKernel<f64>| {
        json!({
            "max_abs": real(k.max_abs()),
            "x_inf": real(k.x_norm(XFamily::Infinity, p)),
            "x_one": real(k.x_norm(XFamily::One, p)),
        })
    };
    let body = json!({
        "grid": n,
        "b1": ctx.cfg.system.b1,
        "b2": ctx.cfg.system.b2,
        "p": ctx.cfg.p,
        "residuals": {
            "r": real(ks.residuals.r),
            "p_plus": real(ks.residuals.p_plus),
            "p_minus": real(ks.residuals.p_minus),
            "boundary": real(ks.residuals.boundary),
        },
        "k_plus": norms(&ks.k_plus),
        "k_minus": norms(&ks.k_minus),
        "r": norms(&ks.r),
        "files": {"k_plus": "k_plus.bin", "k_minus": "k_minus.bin", "samples": "kernel_samples.csv"},
        "sample_stride": stride,
    });
    Ok(vec![
        Artifact::json("kernels.json", ctx.hash, body),
        Artifact::new("k_plus.bin", kernel_bytes(&ks.k_plus)?),
        Artifact::new("k_minus.bin", kernel_bytes(&ks.k_minus)?),
        Artifact::csv("kernel_samples.csv", ctx.hash, &csv),
    ])
}

fn stability_task(ctx: &Context) -> Result<Vec<Artifact>, Failure> {
    let bc = ctx.bc()?;
    let (b1, b2) = ctx.b();
    let st = &ctx.cfg.stability;
    let p = ctx.cfg.p_norm();
    let sampler = PotentialBallSampler::new(p, st.r, st.seed, st.family.family(), st.sampler_grid)?;
    let opts = ExperimentOptions {
        kernel_grid: st.kernel_grid,
        solve: ctx.solve(),
        spectrum: ctx.spectrum(),
        s_norm: ctx.cfg.s_norm(),
    };
    let table = run_ball_experiment(&sampler, b1, b2, &bc, st.pairs, ctx.cfg.n_max, p, &opts)?;
    let spread = |f: fn(&diracspec::stability::BallRow<f64>) -> f64| {
        let v: Vec<f64> = table.rows.iter().map(f).filter(|r| *r > 0.0).collect();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(0.0, f64::max);
        if v.is_empty() {
            Value::Null
        } else {
            real(hi / lo)
        }
    };
    let body = json!({
        "pairs": table.rows.len(),
        "max_kernel_ratio": real(table.max_kernel_ratio),
        "max_eigen_ratio": real(table.max_eigen_ratio),
        "max_eigenfunction_ratio": real(table.max_eigenfunction_ratio),
        "kernel_ratio_spread": spread(|r| r.kernel_ratio),
        "eigen_ratio_spread": spread(|r| r.eigen_ratio),
        "eigenfunction_ratio_spread": spread(|r| r.eigenfunction_ratio),
    });
    Ok(vec![
        Artifact::csv("stability.csv", ctx.hash, &table.to_csv()),
        Artifact::json("stability.json", ctx.hash, body),
    ])
}

fn tail_json(t: &SeriesTail<f64>) -> Value {
    json!({
        "total": real(t.total),
        "last_quarter": real(t.last_quarter),
        "cauchy": t.is_cauchy(),
        "grows": t.grows(),
    })
}

fn bari_task(ctx: &Context) -> Result<Vec<Artifact>, Failure> {
    let bc = ctx.bc()?;
    let (b1, b2) = ctx.b();
    let report = bari_criterion(&bc, b1, b2, ctx.cfg.n_max)?;
    let c = bc.canonicalize()?;
    let mut csv = String::from("n,re_lambda,im_lambda,re_z,im_z,alpha\n");
    for r in &report.rows {
        csv.push_str(&row(&[
            r.n.to_string(),
            r.lambda.re.to_string(),
            r.lambda.im.to_string(),
            r.z.re.to_string(),
            r.z.im.to_string(),
            r.alpha.map(|a| a.to_string()).unwrap_or_default(),
        ]));
    }
    let min_alpha = report
        .rows
        .iter()
        .filter(|r| r.n.abs() > report.head)
        .filter_map(|r| r.alpha)
        .reduce(f64::min);
    let body = json!({
        "verdict": report.verdict.as_str(),
        "selfadjoint": selfadjoint_check(&c, b1, b2),
        "n_max": ctx.cfg.n_max,
        "head": report.head,
        "gate": real(report.gate),
        "gate_holds": report.gate_holds,
        "im_squares": tail_json(&report.im_squares),
        "z_defect": tail_json(&report.z_defect),
        "alpha_sum": tail_json(&report.alpha_sum),
        "min_alpha": opt_real(min_alpha),
    });
    Ok(vec![
        Artifact::csv("bari.csv", ctx.hash, &csv),
        Artifact::json("bari.json", ctx.hash, body),
    ])
}

fn fourier_task(ctx: &Context) -> Result<Vec<Artifact>, Failure> {
    let sys = ctx.system()?;
    let bc = ctx.bc()?;
    let (b1, b2) = ctx.b();
    let fc = &ctx.cfg.fourier;
    let (g, scale) = match fc.entry {
        Entry::Q12 => (sys.q12(), b2 - b1),
        Entry::Q21 => (sys.q21(), b1 - b2),
    };
    let zeros = zeros_delta0(&bc, b1, b2, ctx.cfg.n_max)?;
    let seq: Vec<(i64, num_complex::Complex64)> = zeros.iter().map(|z| (z.n, z.lambda * scale)).collect();
    let p = ctx.cfg.p_norm();
    let report = bessel_sum(g, &seq, p, fc.weighted, fc.maximal)?;
    let mut csv = String::from("n,re_mu,im_mu,abs_transform,maximal_transform\n");
    for (n, mu) in &seq {
        csv.push_str(&row(&[
            n.to_string(),
            mu.re.to_string(),
            mu.im.to_string(),
            fourier(g, *mu).norm().to_string(),
            maximal_fourier(g, *mu).to_string(),
        ]));
    }
    let body = json!({
        "entry": match fc.entry { Entry::Q12 => "q12", Entry::Q21 => "q21" },
        "frequency_scale": scale,
        "p": ctx.cfg.p,
        "weighted": report.weighted,
        "maximal": fc.maximal,
        "terms": seq.len(),
        "sum": real(report.sum),
        "norm_ref": real(report.norm_ref),
        "ratio": real(report.ratio),
    });
    Ok(vec![
        Artifact::csv("fourier.csv", ctx.hash, &csv),
        Artifact::json("fourier.json", ctx.hash, body),
    ])
}
