use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use fp::cayley::{
    check_fixture, components_minus_ei, coverage_minus_ei, fixture_paths, to_dot, Ball, GenSet,
    DEFAULT_VERTEX_CAP,
};
use fp::cube::cubulate;
use fp::error::FpError;
use fp::group::{sigma_apply, Element, GroupContext};
use fp::levels::{alpha, level_word, phi_i};
use fp::subgroup::{enumerate_subgroup_ball, Budget, MembershipOracle, SubgroupId, Tier};
use fp::walls::{properness_csv, properness_scan, WallKey, WallSystem};
use fp_verify::Verifier;

const OK: u8 = 0;
const USAGE: u8 = 1;
const DOWNGRADED: u8 = 2;
const VIOLATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "fp", version, about = "Normal forms, walls and cube-complex checks for the groups F_{n+1} ⋊ F_n")]
struct Cli {
    /// Rank n of the group.
    #[arg(long, global = true, default_value_t = 2)]
    n: usize,
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Oracle enumeration depth L.
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true)]
    slack: Option<usize>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long = "cap-vertices", global = true, default_value_t = DEFAULT_VERTEX_CAP)]
    cap_vertices: usize,
    /// Index of the vertizontal family / subgroup H_i.
    #[arg(long, global = true, default_value_t = 1)]
    i: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Normal form (tw-form) of a word.
    Nf { word: String },
    Mul { a: String, b: String },
    Inv { a: String },
    /// σ(t)(u) for a vertical word t and a horizontal word u.
    Sigma { t: String, u: String },
    /// Reduced word over S_min.
    Smin { a: String },
    /// wt-form (horizontal part first).
    Wt { a: String },
    Phi { a: String },
    Phii { a: String },
    /// Level rewriting of a kernel element.
    Levels { a: String },
    Alpha { a: String },
    /// Membership in H_i.
    Member { a: String },
    /// Enumeration of H_i inside the ball of the given radius.
    Hball,
    Ball {
        #[arg(long, value_enum, default_value_t = Gens::Smin)]
        gens: Gens,
    },
    Components,
    Coverage {
        #[arg(long, default_value_t = 3)]
        margin: usize,
    },
    Fixtures,
    /// Side of g with respect to a wall key such as `H[ε]`, `V[ε; t1]` or `T1[y]`.
    Side { key: String, g: String },
    /// Walls crossed along a word read from g.
    Crossed { g: String, word: String },
    Omega { g: String, h: String },
    Separates { key: String, g: String, h: String },
    /// Crossing graph and maximum clique over the ball.
    Crossing,
    /// Full cube-complex fragment (JSON or DOT).
    Cubulate,
    /// min/mean ω(e, ·) over sampled spheres.
    Properness {
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Runs the ten acceptance checks.
    VerifyAll {
        /// Keep going after a failed check.
        #[arg(long)]
        keep_going: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Gens {
    Smin,
    S,
}

struct Run {
    cli: Cli,
    ctx: GroupContext,
    budget: Budget,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(j) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let ctx = match GroupContext::new(cli.n) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    };
    let mut budget = Budget::default();
    if let Some(d) = cli.depth {
        budget.depth = d;
    }
    if let Some(s) = cli.slack {
        budget.slack = s;
    }
    let run = Run { cli, ctx, budget };
    match run.dispatch() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                FpError::UnresolvedEdges(_) => DOWNGRADED,
                _ => USAGE,
            })
        }
    }
}

fn tier_code(t: Tier) -> u8 {
    if t == Tier::Certified {
        OK
    } else {
        DOWNGRADED
    }
}

impl Run {
    fn el(&self, s: &str) -> fp::error::Result<Element> {
        self.ctx.parse_element(s)
    }

    fn radius(&self, default: usize) -> usize {
        self.cli.radius.unwrap_or(default)
    }

    fn ball(&self, r: usize, gens: GenSet) -> fp::error::Result<Ball> {
        Ball::new(&self.ctx, r, gens, self.cli.cap_vertices)
    }

    fn oracle(&self) -> fp::error::Result<MembershipOracle> {
        self.ctx.check_index(self.cli.i)?;
        Ok(MembershipOracle::new(self.ctx, SubgroupId { i: self.cli.i }))
    }

    fn walls(&self) -> WallSystem {
        WallSystem::new(self.ctx, self.budget)
    }

    /// Writes `text` to `--out` or stdout.
    fn emit(&self, text: &str) -> fp::error::Result<()> {
        match &self.cli.out {
            Some(p) => fs::write(p, text).map_err(|e| FpError::InvalidArgument(format!("{}: {e}", p.display()))),
            None => {
                print!("{text}");
                if !text.ends_with('\n') {
                    println!();
                }
                Ok(())
            }
        }
    }

    /// JSON envelope recording the run configuration.
    fn envelope(&self, radius: Option<usize>, confidence: Tier, result: impl Serialize) -> String {
        let v = json!({
            "n": self.ctx.n(),
            "radius": radius,
            "i": self.cli.i,
            "seed": self.cli.seed,
            "budget": self.budget,
            "confidence": confidence,
            "result": result,
        });
        serde_json::to_string_pretty(&v).expect("serialisable") + "\n"
    }

    /// Prints `text` in text mode, the JSON envelope otherwise.
    fn report(&self, radius: Option<usize>, tier: Tier, text: String, result: impl Serialize) -> fp::error::Result<()> {
        match self.cli.format {
            Format::Json => self.emit(&self.envelope(radius, tier, result)),
            _ => self.emit(&text),
        }
    }

    fn simple(&self, text: String, value: Value) -> fp::error::Result<u8> {
        self.report(None, Tier::Certified, text, value)?;
        Ok(OK)
    }

    fn dispatch(&self) -> fp::error::Result<u8> {
        match &self.cli.cmd {
            Cmd::Nf { word } => {
                let g = self.el(word)?;
                self.simple(g.to_string(), json!(g))
            }
            Cmd::Mul { a, b } => {
                let g = self.el(a)?.mul(&self.el(b)?);
                self.simple(g.to_string(), json!(g))
            }
            Cmd::Inv { a } => {
                let g = self.el(a)?.inverse();
                self.simple(g.to_string(), json!(g))
            }
            Cmd::Sigma { t, u } => {
                let (t, u) = (self.ctx.parse_word(t)?.reduce(), self.ctx.parse_word(u)?.reduce());
                if !t.is_vertical() || !u.is_horizontal() {
                    return Err(FpError::InvalidArgument("sigma takes a vertical and a horizontal word".into()));
                }
                let w = sigma_apply(&t, &u).reduce();
                self.simple(w.to_string(), json!(w))
            }
            Cmd::Smin { a } => {
                let w = self.el(a)?.to_smin_word();
                self.simple(w.to_string(), json!(w))
            }
            Cmd::Wt { a } => {
                let (w, t) = self.el(a)?.wt_form();
                let show = |x: &fp::group::Word| if x.is_empty() { "ε".to_string() } else { x.to_string() };
                self.simple(format!("({}, {})", show(&w), show(&t)), json!({ "w": w, "t": t }))
            }
            Cmd::Phi { a } => {
                let k = self.el(a)?.phi();
                self.simple(k.to_string(), json!(k))
            }
            Cmd::Phii { a } => {
                self.ctx.check_index(self.cli.i)?;
                let k = phi_i(&self.el(a)?, self.cli.i);
                self.simple(k.to_string(), json!(k))
            }
            Cmd::Levels { a } => {
                let lw = level_word(&self.el(a)?)?;
                self.simple(lw.to_string(), json!(lw))
            }
            Cmd::Alpha { a } => {
                let v = alpha(&self.el(a)?)?;
                self.simple(v.to_string(), json!(v))
            }
            Cmd::Member { a } => {
                let o = self.oracle()?;
                let g = self.el(a)?;
                let rec = o.record(&g, self.budget);
                let m = o.membership(&g, self.budget);
                self.report(None, m.tier(), format!("{} [{}]", m.label(), m.tier()), rec)?;
                Ok(tier_code(m.tier()))
            }
            Cmd::Hball => {
                self.ctx.check_index(self.cli.i)?;
                let r = self.radius(self.budget.radius);
                let budget = Budget { radius: r, ..self.budget };
                let rep = enumerate_subgroup_ball(&self.ctx, SubgroupId { i: self.cli.i }, budget).report();
                let tier = if rep.stabilized { Tier::Stabilized } else { Tier::Unresolved };
                let text = format!(
                    "H_{} ∩ B_{r}: {} elements, explored {}, stabilized {}",
                    self.cli.i, rep.retained, rep.explored, rep.stabilized
                );
                self.report(Some(r), tier, text, &rep)?;
                Ok(if rep.stabilized { OK } else { DOWNGRADED })
            }
            Cmd::Ball { gens } => {
                let r = self.radius(3);
                let b = self.ball(r, if *gens == Gens::S { GenSet::S } else { GenSet::Smin })?;
                match self.cli.format {
                    Format::Dot => self.emit(&to_dot(&b, None))?,
                    _ => {
                        let sizes = b.sphere_sizes();
                        let text = format!("|B_{r}| = {}; spheres {:?}", b.len(), sizes);
                        self.report(Some(r), Tier::Certified, text, json!({ "size": b.len(), "spheres": sizes }))?
                    }
                }
                Ok(OK)
            }
            Cmd::Components => {
                let r = self.radius(4);
                let o = self.oracle()?;
                let b = self.ball(r, GenSet::Smin)?;
                let a = components_minus_ei(&o, &b, self.budget);
                let rep = &a.report;
                let tier = if rep.unresolved > 0 {
                    Tier::Unresolved
                } else if rep.stabilized > 0 {
                    Tier::Stabilized
                } else {
                    Tier::Certified
                };
                if self.cli.format == Format::Dot {
                    self.emit(&to_dot(&b, Some(&a)))?;
                } else {
                    let text = format!(
                        "B_{r} minus E_{}: component(e) = {}, component(t{}) = {}, disjoint = {}, stranded = {}, unresolved = {}",
                        self.cli.i, rep.component_e, self.cli.i, rep.component_ti, rep.disjoint, rep.stranded, rep.unresolved
                    );
                    self.report(Some(r), tier, text, rep)?;
                }
                Ok(if !rep.disjoint { VIOLATION } else { tier_code(tier) })
            }
            Cmd::Coverage { margin } => {
                let r = self.radius(4);
                let o = self.oracle()?;
                let b = self.ball(r, GenSet::Smin)?;
                let a = components_minus_ei(&o, &b, self.budget);
                let c = coverage_minus_ei(&a, &b, *margin);
                self.report(Some(r), Tier::Certified, format!("coverage of B_{}: {:.4}", c.sub_ball, c.fraction), &c)?;
                Ok(OK)
            }
            Cmd::Fixtures => {
                let o = self.oracle()?;
                let checks: Vec<_> =
                    fixture_paths(&self.ctx, self.cli.i)?.iter().map(|f| check_fixture(&o, f, self.budget)).collect();
                let text = checks
                    .iter()
                    .map(|c| format!("{:<32} {} [{}]", c.name, if c.ok() { "ok" } else { "FAILED" }, c.tier))
                    .collect::<Vec<_>>()
                    .join("\n");
                let tier = checks.iter().map(|c| c.tier).max().unwrap_or_default();
                self.report(None, tier, text, &checks)?;
                Ok(if checks.iter().all(|c| c.ok()) { tier_code(tier) } else { VIOLATION })
            }
            Cmd::Side { key, g } => {
                let key: WallKey = key.parse()?;
                let (side, tier) = self.walls().side(&key, &self.el(g)?)?;
                self.report(None, tier, format!("{side:?} [{tier}]"), json!({ "key": key, "side": side }))?;
                Ok(tier_code(tier))
            }
            Cmd::Crossed { g, word } => {
                let rep = self.walls().walls_crossed(&self.el(g)?, &self.ctx.parse_word(word)?);
                let text = rep
                    .walls
                    .iter()
                    .map(|t| format!("{} crossed {} net {}", t.key, t.crossings, t.net))
                    .collect::<Vec<_>>()
                    .join("\n");
                self.report(None, rep.tier, text, &rep)?;
                Ok(tier_code(rep.tier))
            }
            Cmd::Omega { g, h } => {
                let o = self.walls().omega(&self.el(g)?, &self.el(h)?);
                let text = format!(
                    "total {} (vertical {}, horizontal {}, vertizontal {:?}) [{}]{}",
                    o.total,
                    o.vertical,
                    o.horizontal,
                    o.vertizontal,
                    o.confidence,
                    if o.upper_bound { " upper bound" } else { "" }
                );
                self.report(None, o.confidence, text, &o)?;
                Ok(if o.upper_bound { DOWNGRADED } else { tier_code(o.confidence) })
            }
            Cmd::Separates { key, g, h } => {
                let key: WallKey = key.parse()?;
                let (sep, tier) = self.walls().separates(&key, &self.el(g)?, &self.el(h)?)?;
                self.report(None, tier, format!("{sep} [{tier}]"), json!({ "key": key, "separates": sep }))?;
                Ok(tier_code(tier))
            }
            Cmd::Crossing | Cmd::Cubulate => self.cube(),
            Cmd::Properness { samples } => {
                let r = self.radius(5);
                let b = self.ball(r, GenSet::Smin)?;
                let rows = properness_scan(&self.walls(), &b, *samples, &mut ChaCha8Rng::seed_from_u64(self.cli.seed));
                let tier = rows.iter().map(|r| r.confidence).max().unwrap_or_default();
                match self.cli.format {
                    Format::Json => self.emit(&self.envelope(Some(r), tier, &rows))?,
                    _ => {
                        let header = format!(
                            "# n={} radius={} samples={} seed={} depth={} slack={}\n",
                            self.ctx.n(),
                            r,
                            samples,
                            self.cli.seed,
                            self.budget.depth,
                            self.budget.slack
                        );
                        self.emit(&(header + &properness_csv(&rows)))?
                    }
                }
                let monotone = rows.windows(2).all(|w| w[0].min_omega <= w[1].min_omega)
                    && rows.iter().skip(1).all(|r| r.min_omega >= 1);
                Ok(if monotone { tier_code(tier) } else { VIOLATION })
            }
            Cmd::VerifyAll { keep_going } => {
                let v = Verifier::new(self.cli.seed, self.budget);
                let mut outcomes = Vec::new();
                for id in 1..=10 {
                    let o = v.run(id);
                    eprintln!("{}", o.line());
                    let failed = !o.pass;
                    outcomes.push(o);
                    if failed && !keep_going {
                        break;
                    }
                }
                let text = outcomes.iter().map(|o| o.line()).collect::<Vec<_>>().join("\n");
                let tier = outcomes.iter().map(|o| o.tier).max().unwrap_or_default();
                self.report(None, tier, text, &outcomes)?;
                Ok(if outcomes.iter().any(|o| !o.pass) { VIOLATION } else { tier_code(tier) })
            }
        }
    }

    fn cube(&self) -> fp::error::Result<u8> {
        let r = self.radius(4);
        let b = self.ball(r, GenSet::Smin)?;
        let f = cubulate(&self.walls(), &b);
        let bound = 2 * self.ctx.n() + 2;
        let tier = if f.unresolved_merges > 0 || !f.crossing.unresolved.is_empty() {
            Tier::Unresolved
        } else {
            f.crossing.tier
        };
        let summary = json!({
            "walls": f.walls.len(),
            "crossingPairs": f.crossing.edges.len(),
            "unresolvedPairs": f.crossing.unresolved.len(),
            "maximalCliques": f.cliques.len(),
            "maxClique": f.max_clique_size(),
            "maxCliqueWalls": f.max_clique.iter().map(|&k| f.walls[k].to_string()).collect::<Vec<_>>(),
            "bound": bound,
            "compositionViolations": f.composition_violations,
            "orientationViolations": f.orientation_violations,
        });
        match (&self.cli.cmd, self.cli.format) {
            (_, Format::Dot) => self.emit(&f.crossing_dot())?,
            (Cmd::Cubulate, Format::Json) => self.emit(&self.envelope(Some(r), tier, &f))?,
            (Cmd::Cubulate, _) if self.cli.out.is_some() => self.emit(&self.envelope(Some(r), tier, &f))?,
            (_, Format::Json) => self.emit(&self.envelope(Some(r), tier, &summary))?,
            _ => {
                let text = format!(
                    "B_{r}: {} walls, {} crossing pairs ({} unresolved), maxClique = {} (bound {bound}), {} maximal cliques, {} composition violations",
                    f.walls.len(),
                    f.crossing.edges.len(),
                    f.crossing.unresolved.len(),
                    f.max_clique_size(),
                    f.cliques.len(),
                    f.composition_violations
                );
                self.emit(&text)?
            }
        }
        Ok(if f.max_clique_size() > bound || f.composition_violations > 0 { VIOLATION } else { tier_code(tier) })
    }
}
