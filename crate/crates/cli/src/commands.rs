use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use anyhow::{bail, Context, Result};
use lrw::graph::write_edge_list;
use lrw::metrics::{jaccard, mean_conductance, nmi, rand_index_sampled};
use lrw::{io, Clustering, GlobalOptions, GroundTruth, IdMap, LabeledGraph, LoadedGraph};

use crate::{ClusterArgs, EvalArgs, Format, GenerateModel, LocalArgs, Metric};

fn open(path: &str) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {path}"))?;
    Ok(BufReader::new(f))
}

fn create(path: &str) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {path}"))?;
    Ok(BufWriter::new(f))
}

pub(crate) fn load_graph(path: &str) -> Result<LoadedGraph> {
    lrw::load_edge_list(open(path)?).with_context(|| format!("reading {path}"))
}

pub(crate) fn generate(model: GenerateModel) -> Result<()> {
    let (lg, out) = match model {
        GenerateModel::Planted {
            n,
            d,
            c,
            q,
            seed,
            out,
        } => {
            let spec = lrw::PlantedPartitionSpec {
                n,
                d,
                c,
                q,
                rng_seed: seed,
            };
            (lrw::generate_planted(&spec)?, out)
        }
        GenerateModel::Powerlaw {
            n,
            dmin,
            dmax,
            cmin,
            cmax,
            gamma,
            beta,
            q,
            seed,
            out,
        } => {
            let spec = lrw::PowerLawSpec {
                n,
                degree_min: dmin,
                degree_max: dmax,
                cluster_min: cmin,
                cluster_max: cmax,
                exponent_degree: gamma,
                exponent_size: beta,
                q,
                rng_seed: seed,
            };
            (lrw::generate_powerlaw(&spec)?, out)
        }
    };
    write_generated(&lg, &out)
}

fn write_generated(lg: &LabeledGraph, prefix: &str) -> Result<()> {
    let g = &lg.graph;
    let ids = IdMap::identity(g.vertex_count());
    let edges = format!("{prefix}.edges");
    let labels = format!("{prefix}.labels");
    let mut w = create(&edges)?;
    write_edge_list(g, &ids, &mut w)?;
    w.flush()?;
    let mut w = create(&labels)?;
    lg.write_labels(&mut w)?;
    w.flush()?;

    let (intra, inter) = lg.edge_split();
    let n = g.vertex_count();
    println!("edges_file={edges}");
    println!("labels_file={labels}");
    println!("n={n}");
    println!("m={}", g.edge_count());
    println!("clusters={}", lg.cluster_count());
    println!("mean_degree={:.4}", 2.0 * g.edge_count() as f64 / n as f64);
    println!("intra_edges={intra}");
    println!("inter_edges={inter}");
    Ok(())
}

pub(crate) fn cluster(args: ClusterArgs) -> Result<()> {
    let params = args.walk.params()?;
    let workers = args.walk.workers()?;
    let loaded = load_graph(&args.input)?;
    let g = &loaded.graph;
    if g.vertex_count() == 0 {
        bail!("{} contains no edges", args.input);
    }
    let options = GlobalOptions {
        rng_seed: args.seed,
        merge: !args.skip_merge,
    };
    let run = lrw::cluster_global(g, &params, &workers, &options)?;

    let mut w = create(&args.output)?;
    match args.format {
        Format::Tsv => io::write_assignment(&run.clustering, &loaded.ids, &mut w)?,
        Format::Clusters => io::write_cluster_lines(&run.clustering, &loaded.ids, &mut w)?,
    }
    w.flush()?;

    let s = &run.stats;
    println!("vertices={}", g.vertex_count());
    println!("edges={}", g.edge_count());
    println!("clusters={}", run.clustering.len());
    println!("rounds={}", s.rounds);
    println!("walks={}", s.walks);
    println!("unconverged={}", s.unconverged);
    println!("merges={}", s.merges);
    println!("threads={}", workers.count());
    println!("explore_seconds={:.6}", s.explore_time.as_secs_f64());
    println!("merge_seconds={:.6}", s.merge_time.as_secs_f64());
    Ok(())
}

pub(crate) fn local(args: LocalArgs) -> Result<()> {
    let params = args.walk.params()?;
    let workers = args.walk.workers()?;
    let loaded = load_graph(&args.input)?;
    let Some(seed) = loaded.ids.compact(args.vertex) else {
        bail!("vertex {} is not in {}", args.vertex, args.input);
    };
    let found = lrw::cluster_local(&loaded.graph, seed, &params, &workers)?;
    let mut members: Vec<u64> = found
        .members
        .iter()
        .map(|&v| loaded.ids.original(v))
        .collect();
    members.sort_unstable();
    let line: Vec<String> = members.iter().map(u64::to_string).collect();
    println!("{}", line.join(" "));
    println!(
        "# size={} s1={} s2={}",
        members.len(),
        found.significant,
        found.explored
    );
    Ok(())
}

fn read_clustering(path: &str, format: Format, ids: &IdMap) -> Result<Clustering> {
    let r = open(path)?;
    let c = match format {
        Format::Tsv => io::clustering_from_assignment(ids, &io::read_assignment(r)?),
        Format::Clusters => io::clustering_from_lines(ids, &io::read_cluster_lines(r)?),
    };
    c.with_context(|| format!("reading {path}"))
}

fn read_truth(path: &str, format: Format, ids: &IdMap) -> Result<GroundTruth> {
    let r = open(path)?;
    let t = match format {
        Format::Tsv => io::truth_from_assignment(ids, &io::read_assignment(r)?),
        Format::Clusters => io::truth_from_lines(ids, &io::read_cluster_lines(r)?),
    };
    t.with_context(|| format!("reading {path}"))
}

/// Mean over predicted clusters of the best Jaccard index against any truth
/// community.
fn best_match_jaccard(pred: &Clustering, truth: &GroundTruth) -> Result<f64> {
    if pred.is_empty() {
        bail!("the prediction has no clusters");
    }
    let mut total = 0.0;
    for c in pred.clusters() {
        let mut best: f64 = 0.0;
        for t in truth.communities() {
            best = best.max(jaccard(&c.members, t)?);
        }
        total += best;
    }
    Ok(total / pred.len() as f64)
}

pub(crate) fn eval(args: EvalArgs) -> Result<()> {
    let loaded = load_graph(&args.graph)?;
    let ids = &loaded.ids;
    let pred = read_clustering(&args.pred, args.pred_format, ids)?;
    let needs_truth = args.metric.iter().any(|m| *m != Metric::Mc);
    let truth = match (&args.truth, needs_truth) {
        (Some(path), _) => Some(read_truth(path, args.truth_format, ids)?),
        (None, true) => bail!("the requested metrics need --truth"),
        (None, false) => None,
    };

    let mut report: Vec<(String, serde_json::Value)> = Vec::new();
    for metric in &args.metric {
        match metric {
            Metric::Nmi => {
                let v = nmi(&pred, truth.as_ref().expect("checked"))?;
                report.push(("nmi".into(), v.into()));
            }
            Metric::Mc => {
                let v = mean_conductance(&loaded.graph, &pred);
                report.push(("mean_conductance".into(), v.into()));
            }
            Metric::Jaccard => {
                let v = best_match_jaccard(&pred, truth.as_ref().expect("checked"))?;
                report.push(("jaccard".into(), v.into()));
            }
            Metric::Rand => {
                let ri = rand_index_sampled(
                    &pred,
                    truth.as_ref().expect("checked"),
                    args.pairs,
                    args.seed,
                )?;
                report.push(("rand".into(), ri.value.into()));
                report.push(("rand_positive_pairs".into(), ri.positive_pairs.into()));
                report.push(("rand_negative_pairs".into(), ri.negative_pairs.into()));
            }
        }
    }
    if args.json {
        let obj: serde_json::Map<String, serde_json::Value> = report.into_iter().collect();
        println!("{}", serde_json::Value::Object(obj));
    } else {
        for (k, v) in report {
            println!("{k}={v}");
        }
    }
    Ok(())
}
