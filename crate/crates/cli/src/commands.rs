use std::fs;
use std::io::{self, BufReader, Write};
use std::path::Path;

use csev::bench::SyntheticWorkload;
use csev::encoding::event_to_line;
use csev::evidence::verify_evidence_full_scan;
use csev::link::{
    anchor, link_chain, verify_inclusion, AnchorSink, FileAnchorSink, MerkleProof, MerkleTree,
};
use csev::store::{
    audit_scan, ingest_events, sidecar_path, Durability, EventStore, EvidenceLog, SidecarIndex,
};
use csev::{
    verify_evidence, Digest, EvidenceItem, FieldRole, KeyPair, Params, PublicKey, RejectReason,
    SuiteId, Verdict, VerifyOutcome,
};

use crate::output::{Line, Out};
use crate::{bench, keyfile, refuse_overwrite, CliError, Command, Global, EXIT_OK, EXIT_REJECT};

type CmdResult = Result<i32, CliError>;

pub fn dispatch(g: &Global, cmd: Command, out: &mut Out<'_>) -> CmdResult {
    match cmd {
        Command::Setup {
            fields,
            suite,
            out: path,
            force,
        } => setup(
            out,
            path.as_deref().unwrap_or(&g.params),
            fields,
            &suite,
            force,
        ),
        Command::Keygen {
            seed,
            suite,
            out: path,
            force,
        } => keygen(
            out,
            path.as_deref().unwrap_or(&g.key),
            seed.as_deref(),
            &suite,
            force,
        ),
        Command::Ingest { input } => ingest(g, out, &input),
        Command::Verify {
            index,
            all,
            full_scan,
        } => verify(g, out, if all { None } else { index }, full_scan),
        Command::Link {
            chain,
            anchor,
            label,
            ..
        } => link(g, out, chain, anchor, label),
        Command::Anchors => anchors(g, out),
        Command::Prove { index, out: path } => prove(g, out, index, &path),
        Command::CheckProof {
            proof,
            index,
            item_hex,
            root,
        } => check_proof(g, out, &proof, index, item_hex.as_deref(), root.as_deref()),
        Command::Bench {
            mode,
            n,
            payload_bytes,
            fields,
            seed,
        } => {
            let params = Params::with_default_roles(fields)?;
            let r = bench(
                &params,
                mode,
                n,
                g.threads.unwrap_or(1),
                payload_bytes,
                seed,
            )?;
            let line = Line::new("bench")
                .kv("mode", r.mode)
                .kv("events", r.events)
                .kv("threads", r.threads)
                .kv("payload_bytes", r.payload_bytes)
                .kv("elapsed_s", format!("{:.6}", r.elapsed.as_secs_f64()))
                .kv("events_per_s", format!("{:.1}", r.events_per_sec))
                .kv("mean_latency_us", format!("{:.3}", r.mean_latency_us))
                .kv("p99_latency_us", format!("{:.3}", r.p99_latency_us))
                .kv("hash_calls_per_event", r.hash_calls_per_event)
                .kv("item_bytes", r.item_bytes)
                .kv("record_bytes", r.record_bytes);
            out.emit(line, || {
                format!(
                    "{} x{} on {} thread(s), {} B payloads: {:.0} events/s, mean {:.2} us, p99 {:.2} us\n\
                     {} hash calls per event; item {} B, record {} B",
                    r.mode,
                    r.events,
                    r.threads,
                    r.payload_bytes,
                    r.events_per_sec,
                    r.mean_latency_us,
                    r.p99_latency_us,
                    r.hash_calls_per_event,
                    r.item_bytes,
                    r.record_bytes
                )
            })?;
            Ok(EXIT_OK)
        }
        Command::Synth {
            n,
            payload_bytes,
            seed,
            out: path,
        } => {
            let mut sink: Box<dyn Write> = match &path {
                Some(p) => Box::new(io::BufWriter::new(fs::File::create(p)?)),
                None => Box::new(io::BufWriter::new(io::stdout())),
            };
            let mut w = SyntheticWorkload::new(seed, payload_bytes);
            for _ in 0..n {
                writeln!(sink, "{}", event_to_line(&w.next_event()))?;
            }
            sink.flush()?;
            Ok(EXIT_OK)
        }
    }
}

fn setup(out: &mut Out<'_>, path: &Path, fields: usize, suite: &str, force: bool) -> CmdResult {
    let suite_id: SuiteId = suite.parse()?;
    let params = Params::setup(fields, suite_id.as_str(), &csev::default_roles(fields))?;
    refuse_overwrite(path, force)?;
    fs::write(path, params.to_bytes())?;
    let roles: Vec<_> = params.field_roles().iter().map(FieldRole::as_str).collect();
    out.emit(
        Line::new("params")
            .kv("path", path.display())
            .kv("fields", params.field_count())
            .kv("suite", params.suite())
            .kv("roles", roles.join(","))
            .kv("digest", params.digest()),
        || {
            format!(
                "wrote {} (k={}, suite {}, roles {})\nparams digest {}",
                path.display(),
                params.field_count(),
                params.suite(),
                roles.join(","),
                params.digest()
            )
        },
    )?;
    Ok(EXIT_OK)
}

fn keygen(
    out: &mut Out<'_>,
    path: &Path,
    seed: Option<&str>,
    suite: &str,
    force: bool,
) -> CmdResult {
    let suite_id: SuiteId = suite.parse()?;
    let seed = seed
        .map(|s| hex::decode(s).map_err(|e| CliError::Config(format!("--seed: {e}"))))
        .transpose()?;
    let kp = KeyPair::keygen(seed.as_deref())?;
    keyfile::write_keypair(path, suite_id, &kp, force)?;
    out.emit(
        Line::new("key")
            .kv("path", path.display())
            .kv("public_path", keyfile::public_path(path).display())
            .kv("suite", suite_id)
            .kv("public_key", hex::encode(kp.public_key().as_bytes()))
            .kv("fingerprint", kp.fingerprint()),
        || {
            format!(
                "wrote {} and {}\nfingerprint {}",
                path.display(),
                keyfile::public_path(path).display(),
                kp.fingerprint()
            )
        },
    )?;
    Ok(EXIT_OK)
}

fn load_params(g: &Global) -> Result<Params, CliError> {
    let bytes = fs::read(&g.params)
        .map_err(|e| CliError::Config(format!("{}: {e}", g.params.display())))?;
    Ok(Params::from_bytes(&bytes)?)
}

fn check_suite(params: &Params, key_suite: SuiteId, key_path: &Path) -> Result<(), CliError> {
    if key_suite != params.suite() {
        return Err(CliError::Config(format!(
            "{} is a {} key but the parameters use suite {}",
            key_path.display(),
            key_suite,
            params.suite()
        )));
    }
    Ok(())
}

fn check_log(params: &Params, log: &EvidenceLog) -> Result<(), CliError> {
    if log.params().digest() != params.digest() {
        return Err(CliError::Config(format!(
            "{} was written under params {} but {} is loaded",
            log.path().display(),
            log.params().digest(),
            params.digest()
        )));
    }
    Ok(())
}

fn open_log(g: &Global, params: &Params) -> Result<EvidenceLog, CliError> {
    if !g.log.exists() {
        return Err(CliError::Config(format!(
            "{}: no such log",
            g.log.display()
        )));
    }
    let log = EvidenceLog::open(&g.log, Durability::Sync)?;
    check_log(params, &log)?;
    Ok(log)
}

/// Params, public key, and log, checked for mutual agreement.
fn auditor_context(g: &Global) -> Result<(Params, PublicKey, EvidenceLog), CliError> {
    let params = load_params(g)?;
    let (suite, pk) = keyfile::read_public(&g.key)?;
    check_suite(&params, suite, &g.key)?;
    let log = open_log(g, &params)?;
    Ok((params, pk, log))
}

fn ingest(g: &Global, out: &mut Out<'_>, input: &Path) -> CmdResult {
    let params = load_params(g)?;
    let (suite, kp) = keyfile::read_secret(&g.key)?;
    check_suite(&params, suite, &g.key)?;
    let idx_path = sidecar_path(&g.log);
    let (mut log, mut index) = if g.log.exists() {
        let log = EvidenceLog::open(&g.log, Durability::Sync)?;
        check_log(&params, &log)?;
        (log, SidecarIndex::open(&idx_path, Durability::Sync)?)
    } else {
        (
            EvidenceLog::create(&g.log, &params, Durability::Sync)?,
            SidecarIndex::create(&idx_path, Durability::Sync)?,
        )
    };
    let events = EventStore::open(&g.events_dir, Durability::Sync)?;
    let report = if input == Path::new("-") {
        ingest_events(
            io::stdin().lock(),
            &params,
            &kp,
            &mut log,
            &mut index,
            &events,
        )?
    } else {
        let f = fs::File::open(input)
            .map_err(|e| CliError::Config(format!("{}: {e}", input.display())))?;
        ingest_events(
            BufReader::new(f),
            &params,
            &kp,
            &mut log,
            &mut index,
            &events,
        )?
    };
    for r in &report.rejected {
        out.emit(
            Line::new("reject")
                .kv("line", r.line)
                .kv("reason", &r.reason),
            || format!("line {}: rejected: {}", r.line, r.reason),
        )?;
    }
    out.emit(
        Line::new("ingest")
            .kv("accepted", report.accepted)
            .kv("duplicates", report.duplicates.len())
            .kv("rejected", report.rejected.len())
            .kv("first_index", report.first_index)
            .kv("records", log.record_count()),
        || {
            format!(
                "appended {} record(s) from index {}; {} duplicate(s), {} rejected; log holds {}",
                report.accepted,
                report.first_index,
                report.duplicates.len(),
                report.rejected.len(),
                log.record_count()
            )
        },
    )?;
    Ok(if report.rejected.is_empty() {
        EXIT_OK
    } else {
        EXIT_REJECT
    })
}

fn reason_pairs(line: Line, params: &Params, reason: RejectReason) -> Line {
    match reason {
        RejectReason::FieldMismatch(i) => line
            .kv("reason", "field_mismatch")
            .kv("field", i)
            .kv("role", params.role(i).map_or("?", |r| r.as_str())),
        other => line.kv("reason", other),
    }
}

fn human_reason(params: &Params, reason: RejectReason) -> String {
    match reason {
        RejectReason::FieldMismatch(i) => format!(
            "field {i} ({}) does not match the event",
            params.role(i).map_or("?", |r| r.as_str())
        ),
        RejectReason::BadSignature => "signature does not verify".into(),
        RejectReason::Malformed => "malformed record".into(),
    }
}

fn verify(g: &Global, out: &mut Out<'_>, index: Option<u64>, full_scan: bool) -> CmdResult {
    let (params, pk, log) = auditor_context(g)?;
    let sidecar = SidecarIndex::open(sidecar_path(&g.log), Durability::Sync)?;
    let events = EventStore::open(&g.events_dir, Durability::Sync)?;
    let indices: Vec<u64> = match index {
        Some(i) => {
            if i >= log.record_count() {
                return Err(csev::Error::IndexOutOfRange {
                    index: i,
                    len: log.record_count(),
                }
                .into());
            }
            vec![i]
        }
        None => (0..log.record_count()).collect(),
    };
    let load = |j: u64| -> Result<_, CliError> {
        let d = sidecar.get(j)?;
        let e = events.get(&d)?.ok_or(csev::Error::MissingEvent(j))?;
        Ok((log.read_record(j)?, e))
    };
    let mut verdicts: Vec<(u64, VerifyOutcome, Option<Vec<usize>>)> =
        Vec::with_capacity(indices.len());
    if full_scan {
        for &j in &indices {
            let (s, e) = load(j)?;
            let scan = verify_evidence_full_scan(&params, &pk, &e, &s);
            let outcome = scan.outcome();
            verdicts.push((j, outcome, Some(scan.mismatched_fields)));
        }
    } else if index.is_none() {
        let report = audit_scan(&params, &pk, &log, &sidecar, &events, g.parallelism())?;
        verdicts.extend(
            report
                .verdicts
                .into_iter()
                .enumerate()
                .map(|(j, v)| (j as u64, v, None)),
        );
    } else {
        for &j in &indices {
            let (s, e) = load(j)?;
            verdicts.push((j, verify_evidence(&params, &pk, &e, &s), None));
        }
    }
    let mut rejected = 0usize;
    for (j, v, fields) in &verdicts {
        let mut line = Line::new("verdict").kv("index", j);
        line = match v.reject_reason() {
            None => line.kv("result", "accept"),
            Some(r) => reason_pairs(line.kv("result", "reject"), &params, r),
        };
        if let Some(f) = fields {
            let list: Vec<_> = f.iter().map(usize::to_string).collect();
            line = line.kv(
                "mismatched_fields",
                if list.is_empty() {
                    "none".into()
                } else {
                    list.join(",")
                },
            );
        }
        match v.reject_reason() {
            None if index.is_none() => out.machine_only(line)?,
            None => out.emit(line, || format!("record {j}: accept"))?,
            Some(r) => {
                rejected += 1;
                out.emit(line, || {
                    let mut s = format!("record {j}: REJECT: {}", human_reason(&params, r));
                    if let Some(f) = fields.as_ref().filter(|f| f.len() > 1) {
                        s.push_str(&format!(" (mismatched fields: {f:?})"));
                    }
                    s
                })?;
            }
        }
    }
    let tail = log.partial_tail();
    out.emit(
        Line::new("verify")
            .kv("records", verdicts.len())
            .kv("accepted", verdicts.len() - rejected)
            .kv("rejected", rejected)
            .kv("partial_tail_bytes", tail),
        || {
            let mut s = format!(
                "{} record(s) checked: {} accept, {} reject",
                verdicts.len(),
                verdicts.len() - rejected,
                rejected
            );
            if tail > 0 {
                s.push_str(&format!(
                    "\nwarning: {tail} stray byte(s) after the last complete record"
                ));
            }
            s
        },
    )?;
    Ok(if rejected == 0 { EXIT_OK } else { EXIT_REJECT })
}

fn read_items(log: &EvidenceLog) -> Result<Vec<EvidenceItem>, CliError> {
    Ok(log.read_all()?.into_iter().map(|s| s.item).collect())
}

fn link(
    g: &Global,
    out: &mut Out<'_>,
    chain: bool,
    do_anchor: bool,
    label: Option<String>,
) -> CmdResult {
    let params = load_params(g)?;
    let log = open_log(g, &params)?;
    let items = read_items(&log)?;
    let (kind, value, size) = if chain {
        let tip = link_chain(&params, &items)?;
        ("chain", tip.tip, tip.length)
    } else {
        let root = MerkleTree::build(&params, &items)?.root();
        ("merkle", root.root, root.tree_size)
    };
    out.emit(
        Line::new(kind).kv("digest", value).kv("length", size),
        || match kind {
            "chain" => format!("chain tip over {size} record(s): {value}"),
            _ => format!("merkle root over {size} record(s): {value}"),
        },
    )?;
    if do_anchor {
        let label = label.unwrap_or_else(|| format!("{kind}:{size}"));
        let mut sink = FileAnchorSink::open(&g.anchor_file)?;
        let r = anchor(&mut sink, value, &label)?;
        out.emit(
            Line::new("anchor")
                .kv("sink", &r.sink_id)
                .kv("sequence", r.sequence)
                .kv("label", &r.label)
                .kv("digest", r.digest)
                .kv("written_at_us", r.written_at_us),
            || format!("anchored as #{} ({}) in {}", r.sequence, r.label, r.sink_id),
        )?;
    }
    Ok(EXIT_OK)
}

fn anchors(g: &Global, out: &mut Out<'_>) -> CmdResult {
    if !g.anchor_file.exists() {
        return Err(CliError::Config(format!(
            "{}: no anchor file",
            g.anchor_file.display()
        )));
    }
    let sink = FileAnchorSink::open(&g.anchor_file)?;
    for r in sink.records()? {
        out.emit(
            Line::new("anchor")
                .kv("sequence", r.sequence)
                .kv("label", &r.label)
                .kv("digest", r.digest)
                .kv("written_at_us", r.written_at_us),
            || format!("#{} {} {}", r.sequence, r.digest, r.label),
        )?;
    }
    Ok(EXIT_OK)
}

fn prove(g: &Global, out: &mut Out<'_>, index: u64, path: &Path) -> CmdResult {
    let params = load_params(g)?;
    let log = open_log(g, &params)?;
    let proof = MerkleTree::build(&params, &read_items(&log)?)?.prove(index)?;
    fs::write(path, proof.to_bytes())?;
    out.emit(
        Line::new("proof")
            .kv("index", proof.leaf_index)
            .kv("tree_size", proof.tree_size)
            .kv("root", proof.root)
            .kv("path_len", proof.path.len())
            .kv("out", path.display()),
        || {
            format!(
                "wrote inclusion proof for record {} of {} to {} (root {})",
                proof.leaf_index,
                proof.tree_size,
                path.display(),
                proof.root
            )
        },
    )?;
    Ok(EXIT_OK)
}

fn check_proof(
    g: &Global,
    out: &mut Out<'_>,
    proof_path: &Path,
    index: Option<u64>,
    item_hex: Option<&str>,
    root: Option<&str>,
) -> CmdResult {
    let params = load_params(g)?;
    let proof = MerkleProof::from_bytes(&fs::read(proof_path)?)?;
    let item = match (index, item_hex) {
        (Some(i), _) => open_log(g, &params)?.read_record(i)?.item,
        (None, Some(h)) => {
            let bytes =
                hex::decode(h.trim()).map_err(|e| CliError::Config(format!("--item-hex: {e}")))?;
            EvidenceItem::deserialize(&params, &bytes)?
        }
        (None, None) => unreachable!("clap requires one of --index, --item-hex"),
    };
    let expected_root = root
        .map(|r| {
            Digest::from_hex(r)
                .ok_or_else(|| CliError::Config("--root: expected 64 hex characters".into()))
        })
        .transpose()?;
    let mut verdict = verify_inclusion(&params, &item, &proof);
    let root_ok = expected_root.is_none_or(|r| r == proof.root);
    if !root_ok {
        verdict = Verdict::Reject;
    }
    let accept = verdict == Verdict::Accept;
    out.emit(
        Line::new("inclusion")
            .kv("index", proof.leaf_index)
            .kv("tree_size", proof.tree_size)
            .kv("root", proof.root)
            .kv("result", if accept { "accept" } else { "reject" }),
        || match (accept, root_ok) {
            (true, _) => format!(
                "item is record {} of {} under root {}",
                proof.leaf_index, proof.tree_size, proof.root
            ),
            (false, false) => format!("proof root {} is not the expected root", proof.root),
            (false, true) => "item is not included under the proof's root".to_string(),
        },
    )?;
    Ok(if accept { EXIT_OK } else { EXIT_REJECT })
}
