use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use powersemi::cancellativity::{
    cancellative_elements_bruteforce, classify_cancellatives_structural, witness_noncancellative,
};
use powersemi::catalog::{
    audit_rejections, classifier_agreement_check, enumerate_semigroups, global_iso_probe,
    AgreementOptions, Catalog, CatalogOptions, ProbeOptions,
};
use powersemi::isomorphism::{
    cancellative_preservation_check, find_isomorphism, lift_isomorphism, restrict_isomorphism,
    verdict, verify_commutativity_transfer,
};
use powersemi::power::{
    build_power_semigroup, congruence_family, downward_complete_closure, DEFAULT_POWER_CAP,
};
use powersemi::report::to_json;
use powersemi::witnesses::free::{
    free_campaign, free_cancellativity_check, parse_word_set, FreeCampaignOptions,
};
use powersemi::witnesses::numerical::{nm_equal, nm_witness_noncancellative, NumericalMonoid};
use powersemi::{Congruence, Error, FiniteSemigroup, SubsetElement, SubsetFamily};

#[derive(Parser)]
#[command(name = "powersemi", version, about = "Power semigroup workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for enumerate and probe.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Allow order-5 enumeration and probing.
    #[arg(long, global = true)]
    long_running: bool,

    /// Report elapsed times as 0 so that reruns are byte-identical.
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Args, Clone, Default)]
struct FamilyArgs {
    /// Downward-complete closure of these sets, e.g. "0,2;1,3".
    #[arg(long, conflicts_with_all = ["congruence", "members"])]
    generators: Option<String>,

    /// Congruence family of a partition given as labels, e.g. "0,1,0,1".
    #[arg(long, conflicts_with = "members")]
    congruence: Option<String>,

    /// Explicit member sets, e.g. "0;1;0,1".
    #[arg(long)]
    members: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a Cayley table and report its flags.
    Validate {
        #[arg(long)]
        table: PathBuf,
    },
    /// Materialize the power semigroup.
    Power {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = DEFAULT_POWER_CAP)]
        cap: usize,
    },
    /// Build a subset family (default: all non-empty subsets) and check it.
    Family {
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Classify the cancellative members of a family both ways.
    Cancellatives {
        #[arg(long)]
        table: PathBuf,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Non-cancellation witness for a set with at least two elements.
    Witness {
        #[arg(long)]
        table: PathBuf,
        /// Elements of the set, e.g. "0,1".
        #[arg(long)]
        set: String,
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// Decide isomorphism of two semigroups (or of their power semigroups).
    Iso {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        power: bool,
    },
    /// Find an isomorphism and lift it to the power semigroups.
    Lift {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long, default_value_t = DEFAULT_POWER_CAP)]
        cap: usize,
    },
    /// Find an isomorphism between the power semigroups and restrict it.
    Restrict {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Enumerate semigroups of an order.
    Enumerate {
        #[arg(long)]
        order: usize,
        /// Keep every labelled table instead of one per class.
        #[arg(long)]
        labelled: bool,
        /// Also audit this fraction of discarded tables.
        #[arg(long)]
        audit: Option<f64>,
        /// Include the tables in the report.
        #[arg(long)]
        tables: bool,
    },
    /// Compare power semigroups of all pairs of non-isomorphic semigroups.
    Probe {
        #[arg(long)]
        order: usize,
    },
    /// Exhaustive agreement check of the two cancellativity classifiers.
    #[command(name = "prop1-check")]
    ClassifierCheck {
        #[arg(long)]
        order: usize,
        #[arg(long, default_value_t = 8)]
        closures: usize,
    },
    /// Gaps and Frobenius number of a numerical monoid.
    Nm {
        #[arg(long)]
        gens: String,
        #[arg(long)]
        gaps: bool,
        /// Compare with the monoid generated by these.
        #[arg(long)]
        compare: Option<String>,
        #[arg(long)]
        member: Option<u64>,
    },
    /// Non-cancellation witness in the finite subsets of a numerical monoid.
    NmWitness {
        #[arg(long)]
        gens: String,
        #[arg(long)]
        set: String,
    },
    /// Cancellativity of one-letter sets in a free semigroup.
    FreeCheck {
        #[arg(long, default_value_t = 3)]
        alphabet: u8,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Check a single instance instead: multiplier words, e.g. "a,b".
        #[arg(long, requires_all = ["y1", "y2"])]
        x: Option<String>,
        #[arg(long)]
        y1: Option<String>,
        #[arg(long)]
        y2: Option<String>,
    },
}

/// Report plus whether it records a theorem violation.
struct Outcome {
    json: String,
    violation: bool,
}

impl Outcome {
    fn ok<T: Serialize>(kind: &str, body: &T) -> Self {
        Outcome {
            json: to_json(kind, body),
            violation: false,
        }
    }

    fn flagged<T: Serialize>(kind: &str, body: &T, violation: bool) -> Self {
        Outcome {
            json: to_json(kind, body),
            violation,
        }
    }
}

fn read_table(path: &Path) -> Result<Arc<FiniteSemigroup>, Error> {
    let text = fs::read_to_string(path)?;
    Ok(Arc::new(text.parse()?))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("bad number {t:?}")))
        })
        .collect()
}

fn parse_set(s: &str) -> Result<SubsetElement, Error> {
    SubsetElement::from_elements(parse_list::<usize>(s)?)
        .ok_or_else(|| Error::Parse(format!("empty set {s:?}")))
}

fn parse_sets(s: &str) -> Result<Vec<SubsetElement>, Error> {
    s.split(';').map(parse_set).collect()
}

fn build_family(s: Arc<FiniteSemigroup>, args: &FamilyArgs) -> Result<SubsetFamily, Error> {
    if let Some(g) = &args.generators {
        let gens = parse_sets(g)?;
        return downward_complete_closure(s, &gens);
    }
    if let Some(c) = &args.congruence {
        let labels = parse_list::<usize>(c)?;
        let cong = Congruence::from_partition(&s, &labels)?;
        return congruence_family(s, &cong);
    }
    if let Some(m) = &args.members {
        return SubsetFamily::new(s, parse_sets(m)?);
    }
    SubsetFamily::full(s)
}

fn masks(xs: &[SubsetElement]) -> Vec<u64> {
    xs.iter().map(|x| x.mask()).collect()
}

fn catalog_options(cli: &Cli) -> CatalogOptions {
    CatalogOptions {
        long_running: cli.long_running,
        jobs: cli.jobs,
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Validate { table } => {
            let s = read_table(table)?;
            let cancellative: Vec<usize> = (0..s.order())
                .filter(|&a| s.is_cancellative(a).unwrap_or(false))
                .collect();
            Ok(Outcome::ok(
                "validate",
                &json!({
                    "order": s.order(),
                    "commutative": s.is_commutative(),
                    "identity": s.identity(),
                    "group": s.is_group(),
                    "cancellative_elements": cancellative,
                }),
            ))
        }
        Command::Power { table, cap } => {
            let s = read_table(table)?;
            let p = build_power_semigroup(&s, *cap)?;
            let elements: Vec<u64> = (1..=p.order() as u64).collect();
            Ok(Outcome::ok(
                "power",
                &json!({
                    "order": p.order(),
                    "elements": elements,
                    "commutative": p.is_commutative(),
                    "identity_mask": p.identity().map(|i| i + 1),
                    "table": p.rows(),
                }),
            ))
        }
        Command::Family { table, family } => {
            let fam = build_family(read_table(table)?, family)?;
            Ok(Outcome::ok("family", &fam.report()))
        }
        Command::Cancellatives { table, family } => {
            let fam = build_family(read_table(table)?, family)?;
            let brute = cancellative_elements_bruteforce(&fam)?;
            let (structural, structural_error) = match classify_cancellatives_structural(&fam) {
                Ok(v) => (Some(masks(&v)), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let agree = structural.as_ref().map(|s| *s == masks(&brute));
            Ok(Outcome::flagged(
                "cancellatives",
                &json!({
                    "family": fam.report(),
                    "bruteforce": masks(&brute),
                    "structural": structural,
                    "structural_error": structural_error,
                    "agree": agree,
                }),
                agree == Some(false),
            ))
        }
        Command::Witness { table, set, family } => {
            let fam = build_family(read_table(table)?, family)?;
            let w = witness_noncancellative(&fam, parse_set(set)?)?;
            Ok(Outcome::ok("witness", &w))
        }
        Command::Iso { left, right, power } => {
            let (mut s, mut t) = (read_table(left)?, read_table(right)?);
            if *power {
                s = Arc::new(s.power_semigroup()?);
                t = Arc::new(t.power_semigroup()?);
            }
            Ok(Outcome::ok("iso", &verdict(&s, &t)))
        }
        Command::Lift { left, right, cap } => {
            let (h, k) = (read_table(left)?, read_table(right)?);
            match find_isomorphism(&h, &k) {
                None => Ok(Outcome::ok(
                    "lift",
                    &json!({"isomorphic": false, "map": null, "lifted": null}),
                )),
                Some(f) => {
                    let big = lift_isomorphism(&f, *cap)?;
                    let preserved = cancellative_preservation_check(&f)?;
                    Ok(Outcome::flagged(
                        "lift",
                        &json!({
                            "isomorphic": true,
                            "map": f.map(),
                            "lifted": big.map(),
                            "cancellativity_preserved": preserved,
                        }),
                        !preserved,
                    ))
                }
            }
        }
        Command::Restrict { left, right } => {
            let (h, k) = (read_table(left)?, read_table(right)?);
            let (p, q) = (SubsetFamily::full(h)?, SubsetFamily::full(k)?);
            let (ph, pk) = (p.semigroup()?, q.semigroup()?);
            match find_isomorphism(&ph, &pk) {
                None => Ok(Outcome::ok(
                    "restrict",
                    &json!({"globally_isomorphic": false, "restricted": null}),
                )),
                Some(big) => {
                    let small = restrict_isomorphism(&p, &q, &big)?;
                    let transfer = if p.ambient().is_commutative() {
                        Some(verify_commutativity_transfer(&p, &q, &big)?)
                    } else {
                        None
                    };
                    Ok(Outcome::flagged(
                        "restrict",
                        &json!({
                            "globally_isomorphic": true,
                            "power_map": big.map(),
                            "restricted": small.map(),
                            "commutativity_transferred": transfer,
                        }),
                        transfer == Some(false),
                    ))
                }
            }
        }
        Command::Enumerate {
            order,
            labelled,
            audit,
            tables,
        } => {
            let catalog = enumerate_semigroups(*order, !labelled, catalog_options(cli))?;
            let audit = match audit {
                Some(f) if !labelled => Some(audit_rejections(&catalog, *f, cli.seed, cli.jobs)?),
                _ => None,
            };
            let violation = audit.as_ref().is_some_and(|a| !a.unmatched.is_empty());
            Ok(Outcome::flagged(
                "enumerate",
                &json!({
                    "order": catalog.order,
                    "up_to_isomorphism": catalog.up_to_isomorphism,
                    "count": catalog.entries.len(),
                    "commutative": catalog.commutative().count(),
                    "stats": catalog.stats,
                    "audit": audit,
                    "tables": tables.then(|| catalog_tables(&catalog)),
                }),
                violation,
            ))
        }
        Command::Probe { order } => {
            let catalog = enumerate_semigroups(*order, true, catalog_options(cli))?;
            let mut report = global_iso_probe(
                &catalog,
                ProbeOptions {
                    jobs: cli.jobs,
                    double_check_negatives: *order <= 3,
                },
            )?;
            if cli.no_timings {
                report = report.without_timings();
            }
            let violation =
                !report.counterexamples.is_empty() || report.double_check_disagreements > 0;
            Ok(Outcome::flagged("probe", &report, violation))
        }
        Command::ClassifierCheck { order, closures } => {
            let catalogs: Vec<Catalog> = (1..=*order)
                .map(|n| enumerate_semigroups(n, true, catalog_options(cli)))
                .collect::<Result<_, _>>()?;
            let refs: Vec<&Catalog> = catalogs.iter().collect();
            let report = classifier_agreement_check(
                &refs,
                AgreementOptions {
                    seed: cli.seed,
                    closure_samples: *closures,
                },
            );
            let violation = !report.clean();
            Ok(Outcome::flagged("prop1-check", &report, violation))
        }
        Command::Nm {
            gens,
            gaps,
            compare,
            member,
        } => {
            let m = NumericalMonoid::new(&parse_list(gens)?)?;
            let mut body = serde_json::to_value(m.report()).expect("serializable");
            if !gaps {
                body.as_object_mut().expect("object").remove("gaps");
            }
            if let Some(c) = compare {
                let other = NumericalMonoid::new(&parse_list(c)?)?;
                body["equal"] = json!(nm_equal(&m, &other));
            }
            if let Some(x) = member {
                body["member"] = json!({"value": x, "contained": m.contains(*x)});
            }
            Ok(Outcome::ok("nm", &body))
        }
        Command::NmWitness { gens, set } => {
            let m = NumericalMonoid::new(&parse_list(gens)?)?;
            let a: BTreeSet<u64> = parse_list(set)?.into_iter().collect();
            Ok(Outcome::ok(
                "nm-witness",
                &nm_witness_noncancellative(&m, &a)?,
            ))
        }
        Command::FreeCheck {
            alphabet,
            trials,
            x,
            y1,
            y2,
        } => {
            if let (Some(x), Some(y1), Some(y2)) = (x, y1, y2) {
                let (x, y1, y2) = (parse_word_set(x)?, parse_word_set(y1)?, parse_word_set(y2)?);
                let ok = free_cancellativity_check(&x, &y1, &y2)?;
                return Ok(Outcome::flagged(
                    "free-check",
                    &json!({"consistent": ok}),
                    !ok,
                ));
            }
            let report = free_campaign(FreeCampaignOptions {
                alphabet: *alphabet,
                trials: *trials,
                seed: cli.seed,
                ..Default::default()
            })?;
            let violation = !report.violations.is_empty();
            Ok(Outcome::flagged("free-check", &report, violation))
        }
    }
}

fn catalog_tables(catalog: &Catalog) -> Vec<serde_json::Value> {
    catalog
        .entries
        .iter()
        .map(|e| json!({"id": e.id, "table": e.semigroup.rows()}))
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &outcome.json),
                None => {
                    print!("{}", outcome.json);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.violation {
                eprintln!("theorem violation recorded in the report");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_theorem_violation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
