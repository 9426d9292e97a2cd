use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use sizephase::combine::{assemble_paper_model, Sector};
use sizephase::lattice::SquareLattice;
use sizephase::prime::{marker_vertices, optimize_row_family, prime_tiling, unpenalised_pattern};
use sizephase::render;
use sizephase::solver::sweep::{sweep_transition, Construction};
use sizephase::solver::{solve, Method};
use sizephase::stabilizer::build_toric_code;
use sizephase::thermal::{critical_beta, table1, Magnitude, RowStatus, DEFAULT_EPSILON};
use sizephase::tiling::{fmt_rational, parse_rational, Assignment};
use sizephase::tm::{
    busy_beaver_table, compile_to_tileset, registry_machine, simulate, Sci, TuringMachine,
};

#[derive(Parser)]
#[command(
    name = "sizephase",
    version,
    about = "Size-driven transitions from weighted tilings and the toric code"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, value_enum, default_value_t = Format::Tsv, global = true)]
    format: Format,
    /// Write the report into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, env = "SIZEPHASE_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    #[value(alias = "bf")]
    Bruteforce,
    Dp,
    #[value(alias = "prop")]
    Propagate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderFormat {
    Ascii,
    Ppm,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a Turing machine (JSON file or bb2/bb3/bb4) into a tile set.
    CompileTm {
        machine: String,
        #[arg(long, default_value_t = sizephase::tm::DEFAULT_COLOUR_CAP)]
        cap: usize,
    },
    /// Run a Turing machine from a blank tape.
    SimulateTm {
        machine: String,
        #[arg(long, default_value_t = 1000)]
        max_steps: u64,
    },
    /// Minimum score of a construction on one lattice.
    Solve {
        #[arg(long, required_unless_present = "tileset")]
        construction: Option<String>,
        /// Tile set JSON file, instead of a construction.
        #[arg(long, conflicts_with = "construction")]
        tileset: Option<PathBuf>,
        #[arg(long)]
        size: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        /// Also print the witness colouring.
        #[arg(long)]
        witness: bool,
    },
    /// Minimum score over square sizes, with the transition size.
    Sweep {
        #[arg(long)]
        construction: String,
        /// Inclusive range `A..B` or a comma list.
        #[arg(long, required_unless_present_all = ["from", "to"])]
        sizes: Option<String>,
        #[arg(long, requires = "to")]
        from: Option<usize>,
        #[arg(long, requires = "from")]
        to: Option<usize>,
        /// Scores at or below this count as the low phase.
        #[arg(long, default_value = "-1/2")]
        low: String,
        /// Scores at or above this count as the high phase.
        #[arg(long, default_value = "0")]
        high: String,
    },
    /// Toric code degeneracy, gap and levels.
    Toric {
        #[arg(long)]
        size: String,
        #[arg(long, default_value = "1")]
        coupling: String,
        /// Include the level table.
        #[arg(long)]
        report: bool,
    },
    /// Combined model: which sector holds the ground state.
    Assemble {
        #[arg(long)]
        construction: String,
        #[arg(long)]
        size: String,
        #[arg(long)]
        report: bool,
    },
    /// Critical temperature for a threshold size, or the whole table.
    Thermal {
        #[command(subcommand)]
        table: Option<ThermalTable>,
        /// Threshold size: an integer or `m.me<exp>`.
        #[arg(long = "N", alias = "n")]
        n: Option<String>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Recompute the period, machine and temperature tables and compare.
    ReproduceTables,
    /// Render an assignment file, or the periodic pattern of a construction.
    Render {
        /// Assignment JSON ({width, height, colours}).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        construction: Option<String>,
        #[arg(long)]
        size: Option<String>,
        #[arg(long = "as", value_enum, default_value_t = RenderFormat::Ascii)]
        render_as: RenderFormat,
        #[arg(long, default_value_t = 8)]
        block: usize,
    },
}

#[derive(Subcommand)]
enum ThermalTable {
    /// Critical temperatures for all tabulated threshold sizes.
    Table1,
}

fn parse_size(s: &str) -> Result<SquareLattice> {
    let (w, h) = match s.split_once(['x', 'X']) {
        Some((w, h)) => (w.trim().parse()?, h.trim().parse()?),
        None => {
            let n = s.trim().parse()?;
            (n, n)
        }
    };
    if w == 0 || h == 0 {
        bail!("lattice sides must be positive");
    }
    Ok(SquareLattice::new(w, h))
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| Ok(x.trim().parse()?)).collect()
}

fn parse_magnitude(s: &str) -> Result<Magnitude> {
    if let Ok(n) = s.parse::<BigUint>() {
        return Ok(Magnitude::Exact(n));
    }
    let (m, e) = s
        .split_once(['e', 'E'])
        .context("expected an integer or m.me<exp>")?;
    Ok(Magnitude::Approx(Sci::new(m.parse()?, e.parse()?)))
}

fn load_machine(arg: &str) -> Result<TuringMachine> {
    if let Some(tm) = registry_machine(arg) {
        return Ok(tm);
    }
    let text = fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
    Ok(TuringMachine::from_json(&text)?)
}

/// A finished report: TSV body, JSON value and file stem.
struct Report {
    name: &'static str,
    tsv: String,
    json: Value,
}

fn config_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn emit(cli: &Cli, r: Report) -> Result<()> {
    let echo = config_echo();
    let body = match cli.format {
        Format::Tsv => format!("# sizephase {echo}\n{}", r.tsv),
        Format::Json => {
            let v = json!({ "config": echo, "result": r.json });
            format!("{}\n", serde_json::to_string_pretty(&v)?)
        }
    };
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let ext = if cli.format == Format::Json {
                "json"
            } else {
                "tsv"
            };
            let path = dir.join(format!("{}.{ext}", r.name));
            fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run(&cli) {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns false when a reproduction check failed.
fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::CompileTm { machine, cap } => {
            let tm = load_machine(machine)?;
            let cm = compile_to_tileset(&tm, *cap)?;
            // the tile set file format is JSON regardless of --format
            let text = cm.tileset.to_json();
            match &cli.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    fs::write(dir.join("tileset.json"), text)?;
                }
                None => println!("{text}"),
            }
        }
        Command::SimulateTm { machine, max_steps } => {
            let tm = load_machine(machine)?;
            let trace = simulate(&tm, *max_steps);
            emit(
                cli,
                Report {
                    name: "trace",
                    tsv: trace.to_string(),
                    json: serde_json::to_value(&trace)?,
                },
            )?;
        }
        Command::Solve {
            construction,
            tileset,
            size,
            method,
            budget,
            witness,
        } => {
            let c = match (construction, tileset) {
                (Some(c), _) => Construction::parse(c)?,
                (None, Some(f)) => Construction::parse(&format!("tiles:{}", f.display()))?,
                (None, None) => bail!("give --construction or --tileset"),
            };
            let lat = parse_size(size)?;
            let prepared = c.prepare()?;
            let (score, used, wit) = match method {
                MethodArg::Auto => {
                    let (s, m) = prepared.min_score(&lat)?;
                    (s, m, None)
                }
                m => {
                    let m = match m {
                        MethodArg::Bruteforce => Method::BruteForce,
                        MethodArg::Dp => Method::ColumnDp,
                        _ => Method::Propagation,
                    };
                    let r = solve(prepared.tileset(), &lat, Some(m), *budget)?;
                    (r.min_score, r.method, r.witness)
                }
            };
            let mut tsv = format!(
                "construction\twidth\theight\tmin_score\tmethod\n{}\t{}\t{}\t{}\t{used:?}\n",
                c.name(),
                lat.width,
                lat.height,
                fmt_rational(&score)
            );
            let mut j = json!({
                "construction": c.name(), "width": lat.width, "height": lat.height,
                "min_score": fmt_rational(&score), "method": used,
            });
            if *witness {
                if let Some(a) = &wit {
                    tsv.push_str(&render::ascii(a, &[]));
                    j["witness"] = serde_json::to_value(a)?;
                }
            }
            emit(
                cli,
                Report {
                    name: "solve",
                    tsv,
                    json: j,
                },
            )?;
        }
        Command::Sweep {
            construction,
            sizes,
            from,
            to,
            low,
            high,
        } => {
            let c = Construction::parse(construction)?;
            let sizes = match (sizes, from, to) {
                (Some(s), _, _) => parse_sizes(s)?,
                (None, Some(a), Some(b)) => (*a..=*b).collect(),
                _ => bail!("give --sizes or --from and --to"),
            };
            let r = sweep_transition(&c, &sizes, &parse_rational(low)?, &parse_rational(high)?)?;
            emit(
                cli,
                Report {
                    name: "sweep",
                    tsv: r.to_tsv(),
                    json: serde_json::to_value(&r)?,
                },
            )?;
        }
        Command::Toric {
            size,
            coupling,
            report,
        } => {
            let lat = parse_size(size)?;
            let h = build_toric_code(&lat, parse_rational(coupling)?);
            let s = h.summary();
            let rescale = h.low_energy_rescale();
            let gap = s
                .gap
                .as_ref()
                .map(fmt_rational)
                .unwrap_or_else(|| "none".into());
            let mut tsv = format!(
                "spins\tterms\trank\tground_energy\tdegeneracy\tgap\tcommuting\n{}\t{}\t{}\t{}\t{}\t{gap}\t{}\n",
                s.spins,
                s.terms,
                s.rank,
                fmt_rational(&s.ground_energy),
                s.ground_degeneracy,
                h.all_commute()
            );
            let mut levels = Vec::new();
            if *report {
                tsv.push_str("energy\trescaled\tcount\n");
                for (e, n) in &s.level_counts {
                    let r = rescale.apply(e);
                    tsv.push_str(&format!("{}\t{}\t{n}\n", fmt_rational(e), fmt_rational(&r)));
                    levels.push(json!({ "energy": fmt_rational(e), "rescaled": fmt_rational(&r), "count": n.to_string() }));
                }
            }
            let j = json!({ "summary": s, "gap": gap, "commuting": h.all_commute(), "rescale": rescale, "levels": levels });
            emit(
                cli,
                Report {
                    name: "toric",
                    tsv,
                    json: j,
                },
            )?;
        }
        Command::Assemble {
            construction,
            size,
            report,
        } => {
            let c = Construction::parse(construction)?;
            let lat = parse_size(size)?;
            let ch = assemble_paper_model(&c, &lat)?;
            let r = ch.report();
            let sector = match r.ground_sector {
                Sector::Tc => "toric",
                Sector::Cl => "classical",
            };
            let mut tsv = format!(
                "construction\twidth\theight\tground_sector\tground_energy\tlambda_min\tpenalty\tgap_lower_bound\n{}\t{}\t{}\t{sector}\t{}\t{}\t{}\t{}\n",
                r.construction, r.width, r.height, r.ground_energy, r.lambda_min, r.penalty, r.gap_lower_bound
            );
            if *report {
                tsv.push_str(&format!(
                    "# classical method {:?}, mixed signatures at or above {}\n",
                    r.classical_method, r.delta
                ));
            }
            emit(
                cli,
                Report {
                    name: "assemble",
                    tsv,
                    json: serde_json::to_value(&r)?,
                },
            )?;
        }
        Command::Thermal { table, n, epsilon } => match (table, n) {
            (Some(ThermalTable::Table1), _) => {
                let (tsv, j, _) = table1_report(*epsilon)?;
                emit(
                    cli,
                    Report {
                        name: "table1",
                        tsv,
                        json: j,
                    },
                )?;
            }
            (None, Some(n)) => {
                let n = parse_magnitude(n)?;
                let t = critical_beta(&n, *epsilon, 1.0)?;
                let tsv = format!(
                    "N\tepsilon\tbeta_delta\tT_over_delta\n{n}\t{epsilon:e}\t{:.6}\t{:.6e}\n",
                    t.beta, t.temperature
                );
                let j = json!({ "N": n.to_string(), "epsilon": epsilon, "beta_delta": t.beta, "T_over_delta": t.temperature });
                emit(
                    cli,
                    Report {
                        name: "thermal",
                        tsv,
                        json: j,
                    },
                )?;
            }
            (None, None) => bail!("give --N or the table1 subcommand"),
        },
        Command::ReproduceTables => return reproduce(cli),
        Command::Render {
            input,
            construction,
            size,
            render_as,
            block,
        } => {
            let (a, highlights) = match (input, construction) {
                (Some(path), _) => {
                    let text = fs::read_to_string(path)?;
                    if text.trim().is_empty() {
                        return write_render(cli, render_as, Vec::new());
                    }
                    let a: Assignment = serde_json::from_str(&text)
                        .map_err(|e| sizephase::Error::Format(e.to_string()))?;
                    (a, Vec::new())
                }
                (None, Some(c)) => {
                    let Construction::Prime { q, bonus } = Construction::parse(c)? else {
                        bail!("only prime constructions have a periodic pattern to render");
                    };
                    let pt = prime_tiling(q, &bonus)?;
                    let lat = parse_size(
                        size.as_deref()
                            .context("--size is required with --construction")?,
                    )?;
                    let a = unpenalised_pattern(&pt, &lat)?;
                    let hl = marker_vertices(&pt, &a);
                    (a, hl)
                }
                (None, None) => bail!("give --input or --construction"),
            };
            let bytes = match render_as {
                RenderFormat::Ascii => render::ascii(&a, &highlights).into_bytes(),
                RenderFormat::Ppm => render::ppm(&a, *block, &highlights),
            };
            return write_render(cli, render_as, bytes);
        }
    }
    Ok(true)
}

fn write_render(cli: &Cli, f: &RenderFormat, bytes: Vec<u8>) -> Result<bool> {
    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let name = if *f == RenderFormat::Ppm {
                "render.ppm"
            } else {
                "render.txt"
            };
            fs::write(dir.join(name), bytes)?;
        }
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(true)
}

fn table1_report(epsilon: f64) -> Result<(String, Value, bool)> {
    let rows = table1(epsilon)?;
    let mut tsv = String::from("d\tN_d\tpublished_T\tcomputed_T\trel_error\tstatus\n");
    for r in &rows {
        tsv.push_str(&format!(
            "{}\t{}\t{}\t{:.4e}\t{:.4}\t{:?}\n",
            r.d, r.n_d, r.published, r.computed, r.relative_error, r.status
        ));
    }
    let ok = rows.iter().all(|r| r.status != RowStatus::Fail);
    Ok((tsv, serde_json::to_value(&rows)?, ok))
}

const TABLE2: [(usize, &[u64], u64); 7] = [
    (2, &[2, 2], 4),
    (3, &[3, 5], 15),
    (4, &[4, 3, 7], 84),
    (5, &[5, 4, 3, 7], 420),
    (6, &[6, 5, 7, 11], 2310),
    (7, &[7, 6, 5, 11, 13], 30030),
    (8, &[8, 7, 11, 13, 15], 120120),
];

const TABLE3: [(usize, usize, &str, &str); 4] = [
    (3, 6, "21", "14"),
    (4, 6, "107", "75"),
    (5, 7, "4.7e7", "3.3e7"),
    (6, 8, "7.4e36534", "5.2e36534"),
];

fn sorted(v: &[u64]) -> Vec<u64> {
    let mut v = v.to_vec();
    v.sort();
    v
}

fn reproduce(cli: &Cli) -> Result<bool> {
    let mut ok = true;
    let mut tsv = String::from(
        "## periods\nq\tpublished_lines\tcomputed_lines\tpublished_p\tcomputed_p\tstatus\n",
    );
    let mut t2 = Vec::new();
    for (q, lines, p) in TABLE2 {
        let (rf, rep) = optimize_row_family(q)?;
        let p_ok = rep.overall_period == BigUint::from(p);
        let lines_ok = sorted(lines) == sorted(&rep.row_periods);
        // the two-colour family is one line made of two sub-periods of 2
        let sub: Vec<u64> = rf.rows.iter().flatten().map(|&x| x as u64).collect();
        let status = match (p_ok, lines_ok) {
            (true, true) => "pass",
            (true, false) if rf.rows.len() == 1 && sorted(&sub) == sorted(lines) => {
                "known-deviation"
            }
            _ => "fail",
        };
        ok &= status != "fail";
        let fmt = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        tsv.push_str(&format!(
            "{q}\t{}\t{}\t{p}\t{}\t{status}\n",
            fmt(lines),
            fmt(&rep.row_periods),
            rep.overall_period
        ));
        t2.push(json!({ "q": q, "published_lines": lines, "computed_lines": rep.row_periods, "published_p": p,
            "computed_p": rep.overall_period.to_string(), "status": status }));
    }

    tsv.push_str("## machines\nstates\tpublished_c\tcomputed_c\tpublished_S\tcomputed_S\tpublished_N\tcomputed_N\tstatus\n");
    let mut t3 = Vec::new();
    for (row, (q, c, s, n)) in busy_beaver_table().iter().zip(TABLE3) {
        // two significant figures, compared as printed
        let status = if row.states == q && row.colours == c && row.steps == s && row.threshold == n
        {
            "pass"
        } else {
            "fail"
        };
        ok &= status == "pass";
        tsv.push_str(&format!(
            "{q}\t{c}\t{}\t{s}\t{}\t{n}\t{}\t{status}\n",
            row.colours, row.steps, row.threshold
        ));
        t3.push(
            json!({ "states": q, "published_colours": c, "computed": row, "published_steps": s,
            "published_threshold": n, "status": status }),
        );
    }

    let (t1_tsv, t1, t1_ok) = table1_report(DEFAULT_EPSILON)?;
    ok &= t1_ok;
    tsv.push_str("## temperatures\n");
    tsv.push_str(&t1_tsv);
    tsv.push_str(&format!("# overall {}\n", if ok { "pass" } else { "fail" }));
    emit(
        cli,
        Report {
            name: "tables",
            tsv,
            json: json!({ "periods": t2, "machines": t3, "temperatures": t1, "pass": ok }),
        },
    )?;
    Ok(ok)
}
