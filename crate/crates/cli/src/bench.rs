//! Benchmark sweeps over the inbound-outbound ratio, printed as CSV.

use std::collections::BTreeMap;

use anyhow::Result;
use lrw::metrics::{jaccard, nmi};
use lrw::{rng, GlobalOptions, GroundTruth, PlantedPartitionSpec, PowerLawSpec, VertexId};
use rand::seq::index;

use crate::{BenchArgs, Sweep};

pub(crate) fn run(args: BenchArgs) -> Result<()> {
    let params = args.walk.params()?;
    let workers = args.walk.workers()?;
    match args.sweep {
        Sweep::Planted => {
            println!("q,graphs,mean_nmi,modal_clusters,mean_clusters");
            for (qi, &q) in args.q.iter().enumerate() {
                let mut scores = 0.0;
                let mut counts = Vec::with_capacity(args.graphs);
                for g in 0..args.graphs {
                    let spec = PlantedPartitionSpec {
                        n: 128,
                        d: 16.0,
                        c: 4,
                        q,
                        rng_seed: rng::stream_id(&[args.seed, qi as u64, g as u64]),
                    };
                    let lg = lrw::generate_planted(&spec)?;
                    let options = GlobalOptions {
                        rng_seed: args.seed,
                        merge: true,
                    };
                    let run = lrw::cluster_global(&lg.graph, &params, &workers, &options)?;
                    scores += nmi(&run.clustering, &GroundTruth::from_labels(&lg.labels))?;
                    counts.push(run.clustering.len());
                }
                let n = args.graphs as f64;
                let mean_clusters = counts.iter().sum::<usize>() as f64 / n;
                println!(
                    "{q},{},{:.4},{},{mean_clusters:.2}",
                    args.graphs,
                    scores / n,
                    mode(&counts)
                );
            }
        }
        Sweep::Local => {
            println!("q,graphs,seeds,mean_jaccard");
            for (qi, &q) in args.q.iter().enumerate() {
                let mut total = 0.0;
                let mut count = 0;
                for g in 0..args.graphs {
                    let spec = PowerLawSpec {
                        q,
                        rng_seed: rng::stream_id(&[args.seed, qi as u64, g as u64]),
                        ..Default::default()
                    };
                    let lg = lrw::generate_powerlaw(&spec)?;
                    let n = lg.graph.vertex_count();
                    let mut pick = rng::stream(spec.rng_seed, 1);
                    for s in index::sample(&mut pick, n, args.seeds.min(n)) {
                        let seed = VertexId::from(s);
                        let found = lrw::cluster_local(&lg.graph, seed, &params, &workers)?;
                        let truth: Vec<VertexId> = lg
                            .graph
                            .vertices()
                            .filter(|v| lg.labels[v.index()] == lg.labels[s])
                            .collect();
                        total += jaccard(&found.members, &truth)?;
                        count += 1;
                    }
                }
                println!("{q},{},{},{:.4}", args.graphs, count, total / count as f64);
            }
        }
    }
    Ok(())
}

fn mode(counts: &[usize]) -> usize {
    let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in counts {
        *freq.entry(c).or_default() += 1;
    }
    freq.into_iter()
        .max_by_key(|&(c, f)| (f, std::cmp::Reverse(c)))
        .map_or(0, |(c, _)| c)
}
