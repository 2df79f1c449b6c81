use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qalink::diagram::{parse_pd, LinkDiagram};
use qalink::families::{classify_pretzel, pretzel_determinant, pretzel_diagram, PretzelSpec};
use qalink::qa::{certify, verify, QACertificate, QAResult, DEFAULT_NODE_BUDGET};
use qalink::statesum::{determinant_jones, jones_in_t, jones_polynomial, state_summary, turaev_genus};
use qalink::table::{resolve_data_dir, table_verify, TABLE_BUDGET};
use qalink::tait::{determinant_tree, diagram_profile, goeritz_determinant};
use qalink::tangle::{replace_with_tangle, RationalTangle};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Link determinants, quasi-alternating certificates and rational tangle
/// replacement on planar diagram (PD) codes.
#[derive(Parser)]
#[command(name = "qalink", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Tree,
    Goeritz,
    Jones,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Determinant of a diagram; `all` cross-checks the three engines.
    Det {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        engine: Engine,
    },
    /// Jones polynomial.
    Jones { file: PathBuf },
    /// Quasi-alternating certificates.
    Qa {
        #[command(subcommand)]
        cmd: QaCmd,
    },
    /// Replace a crossing by a rational tangle C(a1,...,am); prints the PD code.
    Twist {
        file: PathBuf,
        #[arg(long)]
        crossing: usize,
        #[arg(long, allow_hyphen_values = true)]
        tangle: String,
    },
    /// Pretzel links, e.g. `pretzel classify 2,2,-2,-2`.
    Pretzel {
        #[command(subcommand)]
        cmd: PretzelCmd,
    },
    /// Plus/minus adequacy of the diagram.
    Adequacy { file: PathBuf },
    /// Turaev genus of the diagram.
    TuraevGenus { file: PathBuf },
    /// The bundled knot table.
    Table {
        #[command(subcommand)]
        cmd: TableCmd,
    },
}

#[derive(Subcommand)]
enum QaCmd {
    Certify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: usize,
        /// Write the certificate JSON here instead of stdout.
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    Verify { cert: PathBuf, file: PathBuf },
}

#[derive(Subcommand)]
enum PretzelCmd {
    Diagram {
        #[arg(allow_hyphen_values = true)]
        spec: String,
    },
    Det {
        #[arg(allow_hyphen_values = true)]
        spec: String,
    },
    Classify {
        #[arg(allow_hyphen_values = true)]
        spec: String,
    },
}

#[derive(Subcommand)]
enum TableCmd {
    Verify {
        /// Directory holding index.json; defaults to $QACERT_DATA, then the bundled data.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = TABLE_BUDGET)]
        budget: usize,
        /// Also write each entry's certificate to this directory.
        #[arg(long)]
        certs: Option<PathBuf>,
    },
}

fn read_diagram(path: &Path) -> Result<LinkDiagram> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())?
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    parse_pd(&text).with_context(|| format!("parsing {}", path.display()))
}

fn spec(s: &str) -> Result<PretzelSpec> {
    Ok(s.parse::<PretzelSpec>()?)
}

/// Ok(true) is success, Ok(false) a negative answer (exit 1).
fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Det { file, engine } => {
            let d = read_diagram(&file)?;
            let mut values = Vec::new();
            if matches!(engine, Engine::Tree | Engine::All) {
                let v = determinant_tree(&diagram_profile(&d)?);
                println!("tree     {v}");
                values.push(v);
            }
            if matches!(engine, Engine::Goeritz | Engine::All) {
                let v = goeritz_determinant(&d);
                println!("goeritz  {v}");
                values.push(v);
            }
            if matches!(engine, Engine::Jones | Engine::All) {
                let v = determinant_jones(&d)?;
                println!("jones    {v}");
                values.push(v);
            }
            if values.len() > 1 {
                let agree = values.windows(2).all(|w| w[0] == w[1]);
                println!("{}", if agree { "AGREE" } else { "DISAGREE" });
                return Ok(agree);
            }
        }
        Cmd::Jones { file } => {
            let d = read_diagram(&file)?;
            match jones_in_t(&d)? {
                Some(p) => println!("{}", p.render("t")),
                None => println!("{}  (s = t^(1/2))", jones_polynomial(&d)?.render("s")),
            }
        }
        Cmd::Qa { cmd: QaCmd::Certify { file, budget, out } } => {
            let d = read_diagram(&file)?;
            match certify(&d, budget) {
                QAResult::Certified(c) => {
                    let json = c.to_json();
                    match out {
                        Some(p) => {
                            std::fs::write(&p, json + "\n")
                                .with_context(|| format!("writing {}", p.display()))?;
                            println!("Certified: det {}, {} nodes", c.det(), c.node_count());
                        }
                        None => println!("{json}"),
                    }
                }
                QAResult::NotQA(why) => {
                    println!("NotQA: {why}");
                    return Ok(false);
                }
                QAResult::Unknown(why) => {
                    println!("Unknown: {why}");
                    return Ok(false);
                }
            }
        }
        Cmd::Qa { cmd: QaCmd::Verify { cert, file } } => {
            let text = std::fs::read_to_string(&cert)
                .with_context(|| format!("reading {}", cert.display()))?;
            let c = QACertificate::from_json(&text).context("parsing certificate")?;
            let d = read_diagram(&file)?;
            let ok = verify(&c, &d);
            println!("{}", if ok { "OK" } else { "FAILED" });
            return Ok(ok);
        }
        Cmd::Twist { file, crossing, tangle } => {
            let d = read_diagram(&file)?;
            let t: RationalTangle = tangle.parse()?;
            let r = replace_with_tangle(&d, crossing, &t)?;
            let pd = r
                .diagram
                .to_pd()
                .context("replacement produced a diagram with a crossingless component")?;
            println!("{pd}");
        }
        Cmd::Pretzel { cmd } => match cmd {
            PretzelCmd::Diagram { spec: s } => println!("{}", pretzel_diagram(&spec(&s)?).to_pd()?),
            PretzelCmd::Det { spec: s } => println!("{}", pretzel_determinant(&spec(&s)?)),
            PretzelCmd::Classify { spec: s } => {
                let s = spec(&s)?;
                let d = pretzel_diagram(&s);
                let adequate = state_summary(&d).adequate();
                println!(
                    "{}; {}; Turaev genus {}",
                    classify_pretzel(&s).describe(),
                    if adequate { "adequate" } else { "not adequate" },
                    turaev_genus(&d)
                );
            }
        },
        Cmd::Adequacy { file } => {
            let s = state_summary(&read_diagram(&file)?);
            let yn = |b: bool| if b { "yes" } else { "no" };
            println!("plus-adequate   {}", yn(s.plus_adequate));
            println!("minus-adequate  {}", yn(s.minus_adequate));
            println!("{}", if s.adequate() { "adequate" } else { "not adequate" });
        }
        Cmd::TuraevGenus { file } => println!("{}", turaev_genus(&read_diagram(&file)?)),
        Cmd::Table { cmd: TableCmd::Verify { data, budget, certs } } => {
            let dir = resolve_data_dir(data.as_deref());
            let report = table_verify(&dir, budget)?;
            println!("{report}");
            if let Some(out) = certs {
                std::fs::create_dir_all(&out)?;
                for e in &report.entries {
                    if let Some(c) = &e.reduced_certificate {
                        std::fs::write(out.join(format!("{}_reduced.json", e.name)), c.to_json() + "\n")?;
                    }
                    if let Some(c) = &e.certificate {
                        std::fs::write(out.join(format!("{}.json", e.name)), c.to_json() + "\n")?;
                    }
                }
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
