use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use rsl_core::capacity::{bounds_table, capacity_csv, CapacityQuery};
use rsl_core::entropy::{joint_entropy, ObsSet};
use rsl_core::field::{Field, FieldSpec};
use rsl_core::harness::{self, Budget, Check, PropertyResult};
use rsl_core::pmmsr::{CodeError, CodeParams, PmMsrCode, Selector};
use rsl_core::secrecy::{report_for_rows, AttackReport, EavesdropperModel, SecureScheme};

use crate::cluster::{Cluster, ClusterError, Event, Lock, Meta, PayloadMeta, SecureMeta, LAYOUT_VERSION};
use crate::payload;
use crate::CodeArgs;

/// Checks that only make sense on a cluster directory.
const CLUSTER_PROPERTIES: &[&str] = &["cluster.share_integrity", "cluster.share_consistency", "cluster.replay"];

fn build_code(args: &CodeArgs) -> Result<PmMsrCode> {
    let (Some(n), Some(k)) = (args.n, args.k) else {
        bail!("--n and --k are required");
    };
    let params = CodeParams::product_matrix(n, k, args.m)?;
    if let Some(d) = args.d {
        if d != params.d {
            return Err(CodeError::BadParams(format!("product-matrix codes need d = 2k-2 = {}, got {d}", params.d)).into());
        }
    }
    let (p, w) = args.field;
    let field = FieldSpec::new(p as u64, w, None)?;
    Ok(PmMsrCode::new(params, field, None)?)
}

/// Payload as exactly `slots` symbols of `k`, zero padded.
fn payload_symbols<K: Field>(
    k: &K,
    slots: usize,
    input: Option<&Path>,
    symbols: Option<Vec<u64>>,
) -> Result<(Vec<u64>, PayloadMeta)> {
    if let Some(mut s) = symbols {
        if s.len() > slots {
            return Err(ClusterError::PayloadTooLarge {
                got: s.len(),
                capacity: slots,
                unit: "symbols",
            }
            .into());
        }
        if let Some(&bad) = s.iter().find(|&&x| !k.contains(x)) {
            bail!("symbol {bad:#x} is not an element of the payload field");
        }
        let meta = PayloadMeta::Symbols { len: s.len() };
        s.resize(slots, 0);
        return Ok((s, meta));
    }
    let bytes = match input {
        Some(path) => fs::read(path).with_context(|| format!("reading {}", path.display()))?,
        None => Vec::new(),
    };
    let bits = k.payload_bits();
    let capacity = payload::byte_capacity(slots, bits);
    if bytes.len() > capacity {
        return Err(ClusterError::PayloadTooLarge {
            got: bytes.len(),
            capacity,
            unit: "bytes",
        }
        .into());
    }
    Ok((payload::pack(&bytes, bits, slots), PayloadMeta::Bytes { len: bytes.len() }))
}

pub fn encode(
    dir: &Path,
    args: &CodeArgs,
    secure: Option<(usize, usize)>,
    seed: Option<u64>,
    input: Option<&Path>,
    symbols: Option<Vec<u64>>,
) -> Result<bool> {
    let code = build_code(args)?;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let _lock = Lock::acquire(dir)?;
    let b = code.params().b;
    let (shares, payload_meta, scheme, secure_meta) = match secure {
        None => {
            let (msg, pm) = payload_symbols(code.field(), b, input, symbols)?;
            (code.encode(&msg)?, pm, None, None)
        }
        Some((l1, l2)) => {
            let scheme = SecureScheme::new(&code, l1, l2)?;
            let l = scheme.extension().clone();
            let (secret, pm) = payload_symbols(&l, scheme.secret_size(), input, symbols)?;
            let seed = seed.unwrap_or_else(rand::random);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let top = (l.order() - 1) as u64;
            let randomness: Vec<u64> = (0..scheme.randomness()).map(|_| rng.gen_range(0..=top)).collect();
            let codeword = scheme.wrap(&secret, &randomness)?;
            let shares = code.encode_in(&l, &codeword)?;
            let sm = SecureMeta {
                l1,
                l2,
                randomness: scheme.randomness(),
                secret_size: scheme.secret_size(),
                extension: l,
                seed,
            };
            (shares, pm, Some(scheme), Some(sm))
        }
    };
    let meta = Meta {
        layout_version: LAYOUT_VERSION,
        params: *code.params(),
        field: code.field().clone(),
        points: code.points().to_vec(),
        payload: payload_meta,
        secure: secure_meta,
    };
    let cluster = Cluster::create(dir, meta, code, scheme, &shares)?;
    let m = cluster.meta();
    let summary = json!({
        "cluster": dir.display().to_string(),
        "params": m.params,
        "payload": m.payload,
        "secure": m.secure.as_ref().map(|s| json!({
            "l1": s.l1, "l2": s.l2, "randomness": s.randomness, "secret_size": s.secret_size, "seed": s.seed,
        })),
    });
    println!("{summary}");
    Ok(true)
}

pub fn fail_repair(dir: &Path, node: usize, helpers: Option<Vec<usize>>) -> Result<bool> {
    let _lock = Lock::acquire(dir)?;
    let cluster = Cluster::open(dir)?;
    let code = cluster.code();
    code.check_node(node)?;
    let helpers = helpers.unwrap_or_else(|| {
        cluster
            .live_nodes()
            .into_iter()
            .filter(|&i| i != node)
            .take(code.params().d)
            .collect()
    });
    code.check_helpers(node, &helpers)?;
    let k = cluster.symbols();
    let before = cluster.read_share(node)?;
    let symbols = helpers
        .iter()
        .map(|&i| Ok(code.repair_symbol_in(k, i, node, &cluster.require_share(i)?)?))
        .collect::<Result<Vec<_>>>()?;
    let repaired = code.repair_in(k, node, &helpers, &symbols)?;
    if before.as_ref().is_some_and(|b| *b != repaired) {
        return Err(ClusterError::RepairMismatch(node).into());
    }
    let epoch = cluster.next_epoch()?;
    cluster.remove_share(node)?;
    cluster.write_share(node, &repaired)?;
    cluster.append_event(&Event::Repair {
        epoch,
        failed: node,
        helpers: helpers.clone(),
        symbols,
    })?;
    println!(
        "{}",
        json!({"epoch": epoch, "failed": node, "helpers": helpers, "compared_with_previous": before.is_some()})
    );
    Ok(true)
}

pub fn reconstruct(dir: &Path, nodes: Option<Vec<usize>>, output: Option<&Path>) -> Result<bool> {
    let cluster = Cluster::open(dir)?;
    let code = cluster.code();
    let nodes = nodes.unwrap_or_else(|| cluster.live_nodes().into_iter().take(code.params().k).collect());
    code.check_nodes(&nodes)?;
    let shares = nodes
        .iter()
        .map(|&i| Ok((i, cluster.require_share(i)?)))
        .collect::<Result<Vec<_>>>()?;
    let k = cluster.symbols();
    let message = code.reconstruct_in(k, &shares)?;
    let data = match cluster.scheme() {
        Some(s) => s.unwrap(&message)?,
        None => message,
    };
    match cluster.meta().payload {
        PayloadMeta::Bytes { len } => {
            let bytes = payload::unpack(&data, k.payload_bits(), len);
            match output {
                Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
                None => std::io::stdout().write_all(&bytes)?,
            }
        }
        PayloadMeta::Symbols { len } => {
            let text = data[..len].iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",");
            match output {
                Some(path) => fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct AttackOutput {
    #[serde(flatten)]
    report: AttackReport,
    epochs: Vec<u64>,
    observations: usize,
    /// Rank gained by combining epochs over the best single epoch.
    growth: usize,
}

pub fn attack(dir: &Path, e: Vec<usize>, f: Vec<usize>, epochs: Option<(u64, u64)>) -> Result<bool> {
    let cluster = Cluster::open(dir)?;
    let code = cluster.code();
    let model = EavesdropperModel::new(e, f)?;
    model.check(code)?;
    let (lo, hi) = epochs.unwrap_or((0, u64::MAX));
    let b = code.params().b;
    let stored = code.observation_rows(&Selector::Stored(model.e.clone()))?;
    let base = ObsSet::new(code.field().clone(), b, stored)?;
    let mut all = base.clone();
    let mut per_epoch: BTreeMap<u64, ObsSet> = BTreeMap::new();
    for event in cluster.events()? {
        let Event::Repair {
            epoch, failed, helpers, ..
        } = event
        else {
            continue;
        };
        if !model.f.contains(&failed) || epoch < lo || epoch > hi {
            continue;
        }
        let slot = per_epoch.entry(epoch).or_insert_with(|| base.clone());
        for &h in &helpers {
            for o in code.repair_rows(h, failed, epoch) {
                all.push(o.clone())?;
                slot.push(o)?;
            }
        }
    }
    let total = joint_entropy(&all);
    let best = per_epoch
        .values()
        .map(joint_entropy)
        .chain([joint_entropy(&base)])
        .max()
        .unwrap_or(0);
    let report = report_for_rows(code, &model, &all, cluster.scheme())?;
    let out = AttackOutput {
        report,
        epochs: per_epoch.keys().copied().collect(),
        observations: all.len(),
        growth: total - best,
    };
    println!("{}", serde_json::to_string(&out)?);
    Ok(true)
}

fn parse_query(s: &str) -> Result<CapacityQuery> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<usize>().with_context(|| format!("bad number `{x}` in query `{s}`")))
        .collect::<Result<Vec<_>>>()?;
    let [k, d, n, beta, l1, l2] = v[..] else {
        bail!("query `{s}` must be k,d,n,beta,l1,l2");
    };
    Ok(CapacityQuery::msr(k, d, n, beta, l1, l2)?)
}

pub fn capacity_table(queries: &[String], sweep: Option<(u64, u64)>, betas: &[usize], json: bool) -> Result<bool> {
    let mut qs = queries.iter().map(|s| parse_query(s)).collect::<Result<Vec<_>>>()?;
    if let Some((a, b)) = sweep {
        for k in a.max(2) as usize..=b as usize {
            for &beta in betas {
                let d = 2 * k - 2;
                for l1 in 0..k {
                    for l2 in 0..k - l1 {
                        qs.push(CapacityQuery::msr(k, d, d + 1, beta, l1, l2)?);
                    }
                }
            }
        }
    }
    if json {
        let rows = qs
            .iter()
            .map(|q| {
                let t = bounds_table(q)?;
                let bounds: Vec<_> = t
                    .named()
                    .into_iter()
                    .map(|nb| json!({"name": nb.name, "value": nb.value.to_string(), "kind": nb.kind.to_string()}))
                    .collect();
                Ok(json!({"query": q, "bounds": bounds}))
            })
            .collect::<Result<Vec<_>>>()?;
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        print!("{}", capacity_csv(&qs)?);
    }
    Ok(true)
}

pub fn verify(
    dir: Option<&Path>,
    args: &CodeArgs,
    properties: &[String],
    max_cases: Option<usize>,
    seed: Option<u64>,
) -> Result<bool> {
    let cluster = dir.map(Cluster::open).transpose()?;
    let code = match &cluster {
        Some(c) => c.code().clone(),
        None => build_code(args)?,
    };
    let defaults = Budget::default();
    let budget = Budget {
        max_cases: max_cases.unwrap_or(defaults.max_cases),
        seed: seed.unwrap_or(defaults.seed),
        ..defaults
    };
    let ids: Vec<String> = if properties.is_empty() {
        let extra = if cluster.is_some() { CLUSTER_PROPERTIES } else { &[] };
        harness::PROPERTIES.iter().chain(extra).map(|s| s.to_string()).collect()
    } else {
        properties.to_vec()
    };
    let mut ok = true;
    for id in &ids {
        let result = if CLUSTER_PROPERTIES.contains(&id.as_str()) {
            let Some(c) = &cluster else {
                bail!("property {id} needs --cluster");
            };
            cluster_property(id, c)?
        } else {
            match harness::run_property(id, &code, &budget) {
                Some(r) => r,
                None => bail!("unknown property `{id}`"),
            }
        };
        ok &= result.passed();
        println!("{}", result.to_json());
    }
    Ok(ok)
}

fn cluster_property(id: &str, cluster: &Cluster) -> Result<PropertyResult> {
    let name = format!("{} at {}", harness::describe(cluster.code()), cluster.dir().display());
    let mut check = Check::new(id, name);
    let code = cluster.code();
    let k = cluster.symbols();
    match id {
        "cluster.share_integrity" => {
            for i in code.nodes() {
                let r = cluster.read_share(i);
                let ok = matches!(r, Ok(Some(_)));
                check.case(ok, || match r {
                    Ok(None) => json!({"node": i, "error": "missing"}),
                    Err(e) => json!({"node": i, "error": e.to_string()}),
                    Ok(Some(_)) => json!({"node": i}),
                });
            }
        }
        "cluster.share_consistency" => {
            let shares: Vec<(usize, Vec<u64>)> = code
                .nodes()
                .filter_map(|i| cluster.read_share(i).ok().flatten().map(|s| (i, s)))
                .collect();
            let want = code.params().k;
            if shares.len() < want {
                check.case(false, || json!({"readable_nodes": shares.len(), "needed": want}));
                return Ok(check.finish());
            }
            let decoded = code.reconstruct_in(k, &shares[..want]);
            let expected = decoded.and_then(|m| code.encode_in(k, &m));
            match expected {
                Ok(expected) => {
                    for (i, s) in &shares {
                        check.case(*s == expected[i - 1], || json!({"node": i, "reason": "share is not part of the codeword"}));
                    }
                }
                Err(e) => check.case(false, || json!({"error": e.to_string()})),
            }
        }
        "cluster.replay" => {
            let events = cluster.events()?;
            let Some(Event::Encode { shares, .. }) = events.first() else {
                check.case(false, || json!({"reason": "event log does not start with an encode event"}));
                return Ok(check.finish());
            };
            let mut state = shares.clone();
            for event in &events[1..] {
                let Event::Repair {
                    epoch,
                    failed,
                    helpers,
                    symbols,
                } = event
                else {
                    check.case(false, || json!({"epoch": event.epoch(), "reason": "unexpected encode event"}));
                    continue;
                };
                let sent = helpers
                    .iter()
                    .zip(symbols)
                    .all(|(&h, s)| code.repair_symbol_in(k, h, *failed, &state[h - 1]).is_ok_and(|x| x == *s));
                let repaired = code.repair_in(k, *failed, helpers, symbols);
                let exact = repaired.as_ref().is_ok_and(|r| *r == state[failed - 1]);
                check.case(sent && exact, || {
                    json!({"epoch": epoch, "failed": failed, "symbols_match": sent, "exact_repair": exact})
                });
                if let Ok(r) = repaired {
                    state[failed - 1] = r;
                }
            }
            for i in code.nodes() {
                let current = cluster.read_share(i).ok().flatten();
                check.case(current.as_ref() == Some(&state[i - 1]), || {
                    json!({"node": i, "reason": "share file differs from the replayed log"})
                });
            }
        }
        _ => bail!("unknown property `{id}`"),
    }
    Ok(check.finish())
}
