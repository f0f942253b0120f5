use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use forge_core::cobordism::{build_collar, nerve_graph, nerve_matches_reference, power, product_certificate, Ambient, Collar};
use forge_core::complex::Complex2;
use forge_core::exotic::{build_xprime, verify_xprime, vertex_transitivity};
use forge_core::iso::{find_isomorphism, IsoMode};
use forge_core::link::all_links;
use forge_core::pinchfill::{decompose, find_systoles, pinch, refill, systolic_filling, Complex2Json, PinchData};
use forge_core::report::{verify_all, Mutation, VerifyOptions};
use forge_core::rigidity::{check_frame, cover_report, frame_for, free_ball, SeedShape};
use forge_core::toric::{basic_construction, build_torus, involution_check};
use forge_core::typesys::{autf2_type, brady_link, is_of_type, metric_type_a, LabelledType};

#[derive(Parser)]
#[command(name = "forge", version, about = "Build and verify 2-complexes of type Aut(F2)")]
struct Cli {
    /// Emit the JSON verdict: to stdout when given alone, else to the file.
    #[arg(long, global = true, num_args = 0..=1, value_name = "PATH")]
    json: Option<Option<PathBuf>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The 6 x n torus T_n.
    BuildTorus {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The basic construction B_n.
    BuildBn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Verify(VerifyCmd),
    #[command(subcommand, name = "type")]
    Type(TypeCmd),
    /// Grow the free ball of the Aut(F2) type.
    Ball {
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Map the free ball into a target complex.
    Cover {
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Check the torus frame on a basic construction.
    Frame { complex: PathBuf },
    /// Quotient tori by a vertex involution.
    Pinch {
        #[arg(long)]
        tori: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fill the 3-systoles of a pinched torus.
    Fill {
        tprime: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a complex back into tori with an involution.
    Decompose {
        complex: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The collar at height y.
    Collar {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        y: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nerve graph of a saved collar.
    Nerve {
        collar: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    #[command(subcommand)]
    Cobordism(CobordismCmd),
    #[command(subcommand)]
    Xprime(XprimeCmd),
    /// Run every check.
    #[command(name = "verify-paper", alias = "verify-all")]
    VerifyAll {
        /// Inclusive range such as 1..8, or a single n.
        #[arg(long, default_value = "1..8")]
        n: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        /// Corrupt one cell first: corner-flip, deleted-triangle, relabeled-edge, broken-chord, removed-systole.
        #[arg(long)]
        mutate: Option<String>,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Jump involution checks on T_n.
    Jumps {
        #[arg(long, default_value = "1..12")]
        n: String,
    },
    /// Links of B_n against the reference link.
    Links {
        #[arg(long, default_value = "5")]
        n: String,
    },
}

#[derive(Subcommand)]
enum TypeCmd {
    /// Describe a labelled type.
    Show {
        #[arg(default_value = "autf2")]
        name: String,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check a complex against a type.
    Check {
        complex: PathBuf,
        #[arg(long = "type", default_value = "autf2")]
        ty: String,
        /// Only interior vertices need full links.
        #[arg(long)]
        fragment: bool,
    },
}

#[derive(Subcommand)]
enum CobordismCmd {
    /// The n-fold composite of the elementary cobordism.
    Power {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        y: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum XprimeCmd {
    Build {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify a saved complex, or the built one.
    Verify { complex: Option<PathBuf> },
}

/// Usage and input problems, as opposed to failed verification.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| InputError(e).into())
}

fn parse_range(s: &str) -> Result<Vec<usize>> {
    input((|| {
        let s = s.trim();
        if let Some((a, b)) = s.split_once("..") {
            let a: usize = a.parse().with_context(|| format!("bad range start in {s:?}"))?;
            let b = b.strip_prefix('=').unwrap_or(b);
            let b: usize = b.parse().with_context(|| format!("bad range end in {s:?}"))?;
            Ok((a..=b).collect())
        } else {
            Ok(vec![s.parse().with_context(|| format!("bad n {s:?}"))?])
        }
    })())
}

fn load_complex(path: &Path) -> Result<Complex2> {
    input((|| {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Complex2::from_json(&text).with_context(|| format!("parsing {}", path.display()))
    })())
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    input((|| {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    })())
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &serde_json::to_string_pretty(value)?)
}

fn named_type(name: &str) -> Result<LabelledType> {
    match name {
        "autf2" => Ok(autf2_type()),
        "metric-a" | "a" => Ok(metric_type_a()),
        other => input(Err(anyhow::anyhow!("unknown type {other:?}, expected autf2 or metric-a"))),
    }
}

/// Command result: a verdict, a text rendering, and a JSON rendering.
struct Outcome {
    pass: bool,
    text: String,
    json: Value,
}

impl Outcome {
    fn new(pass: bool, text: impl Into<String>, json: Value) -> Self {
        Outcome { pass, text: text.into(), json }
    }
}

fn counts_json(c: &Complex2) -> Value {
    let (v, e, f) = c.euler_counts();
    json!({ "vertices": v, "edges": e, "faces": f })
}

fn built(kind: &str, c: &Complex2, out: Option<&Path>) -> Result<Outcome> {
    if let Some(p) = out {
        write(p, &c.to_json())?;
    }
    let (v, e, f) = c.euler_counts();
    let valid = c.validate().is_ok();
    let text = format!("{kind}: (V,E,F) = ({v}, {e}, {f})");
    Ok(Outcome::new(valid, text, json!({ "kind": kind, "counts": counts_json(c), "valid": valid })))
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::BuildTorus { n, out } => {
            let t = input(build_torus(*n).map_err(Into::into))?;
            built(&format!("T_{n}"), &t, out.as_deref())
        }
        Command::BuildBn { n, out } => {
            let b = input(basic_construction(*n).map_err(Into::into))?;
            built(&format!("B_{n}"), &b.complex, out.as_deref())
        }
        Command::Verify(VerifyCmd::Jumps { n }) => {
            let mut lines = Vec::new();
            let mut reports = Vec::new();
            let mut pass = true;
            for n in parse_range(n)? {
                let r = input(involution_check(n).map_err(Into::into))?;
                pass &= r.passed();
                lines.push(format!(
                    "n={n}: {} jumps, {} orbits, fixed points {}, {}",
                    r.induced_jumps,
                    r.orbit_count,
                    r.fixed_points.len(),
                    if r.passed() { "pass" } else { "FAIL" }
                ));
                reports.push(json!({ "n": n, "pass": r.passed(), "report": r }));
            }
            Ok(Outcome::new(pass, lines.join("\n"), json!({ "pass": pass, "checks": reports })))
        }
        Command::Verify(VerifyCmd::Links { n }) => {
            let reference = brady_link();
            let mut lines = Vec::new();
            let mut verdicts = Vec::new();
            let mut pass = true;
            for n in parse_range(n)? {
                let b = input(basic_construction(n).map_err(Into::into))?;
                for (v, l) in all_links(&b.complex).iter().enumerate() {
                    let w = find_isomorphism(l, &reference, IsoMode::Label);
                    let girth = l.girth().map(|g| g.0);
                    let ok = w.is_some() && girth == Some(12);
                    pass &= ok;
                    lines.push(format!("n={n} vertex {v}: girth {girth:?}, {}", if ok { "pass" } else { "FAIL" }));
                    verdicts.push(json!({ "n": n, "vertex": v, "pass": ok, "girth": girth, "mapping": w.map(|w| w.mapping) }));
                }
            }
            Ok(Outcome::new(pass, lines.join("\n"), json!({ "pass": pass, "links": verdicts })))
        }
        Command::Type(TypeCmd::Show { name, dot }) => {
            let ty = named_type(name)?;
            if let Some(p) = dot {
                let text: String = ty.links.iter().enumerate().map(|(i, l)| l.to_dot(&format!("{}_{i}", ty.name))).collect();
                write(p, &text)?;
            }
            let shapes: Vec<String> = ty.shapes.iter().map(|s| format!("{} ({} sides)", s.id, s.boundary_len())).collect();
            let text = format!("{}: {} link(s), shapes {}, mode {:?}", ty.name, ty.links.len(), shapes.join(", "), ty.mode);
            Ok(Outcome::new(true, text, serde_json::to_value(&ty)?))
        }
        Command::Type(TypeCmd::Check { complex, ty, fragment }) => {
            let c = load_complex(complex)?;
            let r = is_of_type(&c, &named_type(ty)?, *fragment);
            let mut text = format!("{}: {}", r.type_name, if r.pass { "pass" } else { "FAIL" });
            for reason in &r.reasons {
                text.push_str(&format!("\n  {reason}"));
            }
            Ok(Outcome::new(r.pass, text, serde_json::to_value(&r)?))
        }
        Command::Ball { radius, out } => {
            let b = free_ball(&autf2_type(), *radius, SeedShape::Triangle)?;
            if let Some(p) = out {
                write(p, &b.complex.to_json())?;
            }
            let admissible: Vec<usize> = b.steps.iter().map(|s| s.admissible).collect();
            let pass = b.unique_steps();
            let text = format!(
                "radius {radius}: (V,E,F) = {:?}, {} steps, {}",
                b.complex.euler_counts(),
                b.steps.len(),
                if pass { "every step forced" } else { "AMBIGUOUS" }
            );
            Ok(Outcome::new(
                pass,
                text,
                json!({ "radius": radius, "counts": counts_json(&b.complex), "steps": b.steps, "admissible": admissible, "pass": pass }),
            ))
        }
        Command::Cover { target, radius } => {
            let t = load_complex(target)?;
            let ty = autf2_type();
            let b = free_ball(&ty, *radius, SeedShape::Triangle)?;
            match cover_report(&b, &t, &ty) {
                Ok(r) => {
                    let pass = r.total && r.deterministic && r.certified == r.interior;
                    let text = format!(
                        "radius {radius}: {} of {} interior germs certified, total {}, deterministic {}",
                        r.certified, r.interior, r.total, r.deterministic
                    );
                    Ok(Outcome::new(pass, text, serde_json::to_value(&r)?))
                }
                Err(e) => Ok(Outcome::new(false, format!("cover failed: {e}"), json!({ "pass": false, "error": e.to_string() }))),
            }
        }
        Command::Frame { complex } => {
            let c = load_complex(complex)?;
            let r = check_frame(&c, &frame_for(&c));
            let mut text = format!("{}/{} lozenges certified", r.certified, r.lozenges);
            for f in &r.failures {
                text.push_str(&format!("\n  {f}"));
            }
            Ok(Outcome::new(r.passed(), text, serde_json::to_value(&r)?))
        }
        Command::Pinch { tori, sigma, out } => {
            let tori: Vec<Complex2Json> = load_json(tori)?;
            let sigma: Vec<(usize, usize)> = load_json(sigma)?;
            let data = PinchData { tori, sigma };
            match pinch(&data) {
                Ok(c) => built("pinched", &c, out.as_deref()),
                Err(e) => Ok(Outcome::new(false, format!("pinch failed: {e}"), json!({ "pass": false, "error": e.to_string() }))),
            }
        }
        Command::Fill { tprime, out } => {
            let c = load_complex(tprime)?;
            let systoles = find_systoles(&c);
            match systolic_filling(&c) {
                Ok(f) => {
                    if let Some(p) = out {
                        write(p, &f.complex.to_json())?;
                    }
                    let pass = f.report.type_check.pass;
                    let text = format!(
                        "{} systoles, {} filling(s), min link girth {:?}, type {}",
                        systoles.systoles.len(),
                        f.report.valid_covers,
                        f.report.min_girth,
                        if pass { "pass" } else { "FAIL" }
                    );
                    Ok(Outcome::new(pass, text, json!({ "pass": pass, "report": f.report, "counts": counts_json(&f.complex) })))
                }
                Err(e) => Ok(Outcome::new(
                    false,
                    format!("fill failed: {e}"),
                    json!({ "pass": false, "error": e.to_string(), "systoles": systoles }),
                )),
            }
        }
        Command::Decompose { complex, out } => {
            let c = load_complex(complex)?;
            match decompose(&c) {
                Ok(d) => {
                    if let Some(p) = out {
                        write_json(p, &d)?;
                    }
                    let round_trip = refill(&d).map(|f| forge_core::complex_iso::is_isomorphic(&f.complex, &c)).unwrap_or(false);
                    let text = format!(
                        "{} torus piece(s) {:?}, {} σ pairs, round trip {}, proxy {}",
                        d.tori.len(),
                        d.sizes(),
                        d.sigma.len(),
                        if round_trip { "pass" } else { "FAIL" },
                        if d.proxy.holds() { "holds" } else { "warns" }
                    );
                    Ok(Outcome::new(
                        round_trip,
                        text,
                        json!({ "pass": round_trip, "sizes": d.sizes(), "sigma": d.sigma, "proxy": d.proxy }),
                    ))
                }
                Err(e) => Ok(Outcome::new(false, format!("decompose failed: {e}"), json!({ "pass": false, "error": e.to_string() }))),
            }
        }
        Command::Collar { y, out } => {
            let amb = Ambient::new(y - 12, y + 4)?;
            let collar = build_collar(*y, &amb)?;
            let cert = product_certificate(&collar, &amb);
            if let Some(p) = out {
                write_json(p, &collar)?;
            }
            let text = format!(
                "collar at y={y}: gallery of length {}, triples {}, product certificate {}",
                collar.gallery.len(),
                collar.triple_names().join(" "),
                if cert.is_ok() { "pass" } else { "FAIL" }
            );
            Ok(Outcome::new(cert.is_ok(), text, json!({ "pass": cert.is_ok(), "collar": collar })))
        }
        Command::Nerve { collar, dot } => {
            let collar: Collar = load_json(collar)?;
            let amb = Ambient::new(collar.y - 12, collar.y + 4)?;
            let h = nerve_graph(&collar, &amb.strip);
            if let Some(p) = dot {
                write(p, &h.to_dot("H"))?;
            }
            let pass = nerve_matches_reference(&h);
            let text = format!(
                "nerve: {} vertices, {} edges, reference {}",
                h.vertex_count(),
                h.edge_count(),
                if pass { "match" } else { "MISMATCH" }
            );
            Ok(Outcome::new(pass, text, json!({ "pass": pass, "nerve": h })))
        }
        Command::Cobordism(CobordismCmd::Power { n, y, out }) => {
            let p = power(*n, *y)?;
            let (c, _) = p.realize()?;
            if let Some(path) = out {
                write(path, &c.to_json())?;
            }
            let text = format!("power {n}: {} closed triangles, (V,E,F) = {:?}", p.closed_triangle_count(), c.euler_counts());
            Ok(Outcome::new(
                true,
                text,
                json!({ "n": n, "closed_triangles": p.closed_triangle_count(), "counts": counts_json(&c), "cobordism": p }),
            ))
        }
        Command::Xprime(XprimeCmd::Build { out }) => {
            let c = build_xprime()?;
            built("X'", &c, out.as_deref())
        }
        Command::Xprime(XprimeCmd::Verify { complex }) => {
            let c = match complex {
                Some(p) => load_complex(p)?,
                None => build_xprime()?,
            };
            let r = verify_xprime(&c)?;
            let t = vertex_transitivity(&c);
            let pass = r.all_links_isometric() && r.type_a.pass && !r.autf2.pass && t.transitive(c.vertex_count());
            let mut text = format!("X': (V,E,F) = {:?}, degrees {:?}", r.counts, r.degrees);
            for l in &r.links {
                text.push_str(&format!("\n  link at {}: isometric {}, total length {}", l.vertex, l.isometric, l.total_length));
            }
            text.push_str(&format!("\n  Aut(F2) type: {} ({})", r.autf2.pass, r.autf2.reasons.first().cloned().unwrap_or_default()));
            text.push_str(&format!("\n  metric type: {}", r.type_a.pass));
            text.push_str(&format!("\n  automorphisms {}, vertex orbit {}", t.automorphisms, t.orbit_of_first.len()));
            Ok(Outcome::new(pass, text, json!({ "pass": pass, "report": r, "transitivity": t })))
        }
        Command::VerifyAll { n, radius, mutate } => {
            let mutation = match mutate {
                Some(m) => Some(input(m.parse::<Mutation>().map_err(anyhow::Error::msg))?),
                None => None,
            };
            let report = verify_all(&VerifyOptions { ns: parse_range(n)?, radius: *radius, mutation });
            Ok(Outcome::new(report.passed(), report.to_text().trim_end(), serde_json::to_value(&report)?))
        }
    }
}

/// Prints a line, ignoring a closed stdout.
fn say(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            let rendered = serde_json::to_string_pretty(&o.json).expect("json values serialize");
            match &cli.json {
                Some(None) => say(&rendered),
                Some(Some(path)) => {
                    say(&o.text);
                    if let Err(e) = write(path, &rendered) {
                        eprintln!("error: {e:#}");
                        return ExitCode::from(2);
                    }
                }
                None => say(&o.text),
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
