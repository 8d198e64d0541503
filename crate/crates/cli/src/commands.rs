use std::collections::HashSet;
use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use lexalign::ablation::write_ablation_csv;
use lexalign::design::{
    build_affinity, cluster, generate_triplets, pick_target_cluster, read_stimulus_csv,
    schedule_triplets, select_stimuli, write_schedule_csv, write_stimulus_csv, AffinityOptions,
    ClusterOptions, DesignError, Manifest, SelectionConfig, Triple,
};
use lexalign::ingest::{
    load_feature_table, load_judgments, load_lexicon, load_ratings, old20_batch, FeatureBounds,
    FeatureColumn, FeatureTable, IngestError, Lexicon,
};
use lexalign::rdm::{
    behavioral_rdm, embedding_rdm, feature_rdm, read_rdm_csv, write_condensed_csv, write_rdm_csv,
    Rdm, RdmError,
};
use lexalign::report::{
    judgment_words, load_embeddings, load_inputs, load_word_list, run_ablations,
    run_alignment_report, validate_config, EmbeddingSource, PipelineConfig,
};
use lexalign::stats::{partial_spearman, rsa, PValueMethod};
use lexalign::synth::{SynthOptions, SynthWorld};
use lexalign::text::char_len;

use crate::error::CliError;
use crate::settings::{flag_path, Document};
use crate::{
    AblateArgs, IngestArgs, Old20Args, PartialArgs, RdmArgs, RdmKindArg, ReportArgs, RsaArgs,
    ScheduleArgs, SelectArgs, ServeArgs, SynthArgs, TripletsArgs,
};

type Result<T> = std::result::Result<T, CliError>;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn ingest_err(path: &Path) -> impl FnOnce(IngestError) -> CliError + '_ {
    move |e| match e {
        IngestError::Io(e) => CliError::Runtime(format!("{}: {e}", path.display())),
        e => CliError::Validation(format!("{}: {e}", path.display())),
    }
}

fn design_err(e: DesignError) -> CliError {
    match e {
        DesignError::Io(e) => CliError::runtime(e),
        e => CliError::invalid(e),
    }
}

fn rdm_err(path: &Path) -> impl FnOnce(RdmError) -> CliError + '_ {
    move |e| match e {
        RdmError::Io(e) => CliError::Runtime(format!("{}: {e}", path.display())),
        e => CliError::Validation(format!("{}: {e}", path.display())),
    }
}

/// Sends `bytes` to `path`, or to stdout without one.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)
                    .map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
            }
            fs::write(p, bytes).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))
        }
        None => io::stdout().write_all(bytes).map_err(CliError::runtime),
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.toml");
    out.with_file_name(name)
}

fn write_manifest(out: Option<&Path>, manifest: &Manifest) -> Result<()> {
    match out {
        Some(p) => emit(Some(&manifest_path(p)), manifest.to_toml().as_bytes()),
        None => Ok(()),
    }
}

fn required(v: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    v.ok_or_else(|| CliError::Validation(format!("no {what} given")))
}

fn load_features(path: &Path) -> Result<FeatureTable> {
    load_feature_table(open(path)?, &FeatureBounds::new()).map_err(ingest_err(path))
}

fn load_lexicon_file(path: &Path) -> Result<Lexicon> {
    load_lexicon(open(path)?).map_err(ingest_err(path))
}

fn words_from(path: &Path) -> Result<Vec<String>> {
    Ok(load_word_list(path)?)
}

/// Adds log frequency, OLD20 and length columns the table lacks. Returns
/// the names of the added columns.
fn derive_columns(
    features: &mut FeatureTable,
    lexicon: Option<&Lexicon>,
    names: [&str; 3],
    constant: f64,
) -> Result<Vec<String>> {
    let [frequency, old20, length] = names;
    let words = features.words().to_vec();
    let mut added = Vec::new();
    let mut insert = |t: &mut FeatureTable, name: &str, col: FeatureColumn| -> Result<()> {
        t.insert_column(name, col, None)
            .map_err(CliError::invalid)?;
        added.push(name.to_string());
        Ok(())
    };
    if let Some(lex) = lexicon {
        if features.column(frequency).is_none() {
            let col = words
                .iter()
                .map(|w| (w.clone(), lex.log_frequency(w, constant).unwrap_or(0.0)))
                .collect();
            insert(features, frequency, col)?;
        }
        if features.column(old20).is_none() {
            let col = words
                .iter()
                .cloned()
                .zip(old20_batch(&words, lex))
                .map(|(w, r)| r.map(|v| (w, v)))
                .collect::<std::result::Result<_, _>>()
                .map_err(CliError::invalid)?;
            insert(features, old20, col)?;
        }
    }
    if features.column(length).is_none() {
        let col = words
            .iter()
            .map(|w| (w.clone(), char_len(w) as f64))
            .collect();
        insert(features, length, col)?;
    }
    Ok(added)
}

pub fn ingest(doc: &Document, a: &IngestArgs) -> Result<()> {
    let cfg = doc.pipeline_partial(&a.paths)?;
    let set = |p: &Path| (!p.as_os_str().is_empty()).then(|| doc.resolve(p));
    let features_path = required(set(&cfg.inputs.features), "feature table (--features)")?;
    let mut features = load_features(&features_path)?;
    eprintln!(
        "features: {} words, columns {}",
        features.words().len(),
        features.feature_names().join(", ")
    );
    let lexicon = match &cfg.inputs.lexicon {
        Some(p) => {
            let p = doc.resolve(p);
            let lex = load_lexicon_file(&p)?;
            eprintln!("lexicon: {} entries, {} tokens", lex.len(), lex.total());
            Some(lex)
        }
        None => None,
    };
    let c = &cfg.columns;
    let added = derive_columns(
        &mut features,
        lexicon.as_ref(),
        [&c.frequency, &c.old20, &c.length],
        a.frequency_constant,
    )?;
    if !added.is_empty() {
        eprintln!("derived columns: {}", added.join(", "));
    }

    let mut problems = Vec::new();
    let mut check_words: Option<Vec<String>> = match &cfg.inputs.test_words {
        Some(p) => Some(words_from(&doc.resolve(p))?),
        None => None,
    };
    if let Some(p) = set(&cfg.inputs.judgments) {
        let j = load_judgments(open(&p)?).map_err(ingest_err(&p))?;
        let sessions: HashSet<&str> = j.iter().map(|r| r.session_id.as_str()).collect();
        let words = judgment_words(&j);
        eprintln!(
            "judgments: {} rows over {} words, {} sessions",
            j.len(),
            words.len(),
            sessions.len()
        );
        check_words.get_or_insert(words);
    }
    if let Some(p) = &cfg.inputs.ratings {
        let p = doc.resolve(p);
        let r = load_ratings(open(&p)?).map_err(ingest_err(&p))?;
        let words: HashSet<&str> = r.iter().map(|x| x.word.as_str()).collect();
        eprintln!("ratings: {} rows over {} words", r.len(), words.len());
    }
    for src in &cfg.embeddings {
        let t = load_embeddings(&doc.resolve(&src.path), &src.name, src.merge_duplicates)?;
        eprintln!(
            "embeddings {}: {} words, dim {}",
            t.source_name(),
            t.len(),
            t.dim()
        );
        if let Some(words) = &check_words {
            let missing: Vec<&String> = words.iter().filter(|w| !t.contains(w)).collect();
            if !missing.is_empty() {
                eprintln!(
                    "  {} of {} test words have no vector, e.g. {:?}",
                    missing.len(),
                    words.len(),
                    missing[0]
                );
            }
        }
    }
    if let Some(words) = &check_words {
        let known: HashSet<&str> = features.words().iter().map(String::as_str).collect();
        let missing: Vec<&String> = words
            .iter()
            .filter(|w| !known.contains(w.as_str()))
            .collect();
        if !missing.is_empty() {
            problems.push(format!(
                "{} test words have no feature row: {:?}",
                missing.len(),
                missing
            ));
        }
    }
    if let Some(out) = &a.out {
        let mut buf = Vec::new();
        features.write(&mut buf).map_err(CliError::runtime)?;
        emit(Some(&flag_path(out)), &buf)?;
        eprintln!("wrote {}", out.display());
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(problems.join("\n")))
    }
}

pub fn old20(doc: &Document, a: &Old20Args) -> Result<()> {
    let lex_path = a
        .lexicon
        .as_deref()
        .map(flag_path)
        .or_else(|| doc.design.lexicon.as_deref().map(|p| doc.resolve(p)));
    let lex_path = required(lex_path, "lexicon (--lexicon)")?;
    let lexicon = load_lexicon_file(&lex_path)?;
    let mut words: Vec<String> = a
        .words
        .iter()
        .map(|w| lexalign::text::normalize(w))
        .collect();
    if let Some(p) = &a.word_list {
        words.extend(words_from(&flag_path(p))?);
    }
    if words.is_empty() {
        return Err(CliError::invalid("no words given"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["word", "old20"])
        .map_err(CliError::runtime)?;
    for (word, r) in words.iter().zip(old20_batch(&words, &lexicon)) {
        let v = r.map_err(|e| CliError::Validation(format!("{word}: {e}")))?;
        w.write_record([word.as_str(), &v.to_string()])
            .map_err(CliError::runtime)?;
    }
    emit(
        a.out.as_deref(),
        &w.into_inner().map_err(CliError::runtime)?,
    )
}

pub fn select(doc: &Document, a: &SelectArgs) -> Result<()> {
    let d = &doc.design;
    let emb_path = required(
        doc.design_path(&a.embeddings, |d| &d.embeddings),
        "embedding file (--embeddings)",
    )?;
    let feat_path = required(
        doc.design_path(&a.features, |d| &d.features),
        "feature table (--features)",
    )?;
    let embeddings = load_embeddings(&emb_path, "design", a.merge_duplicates)?;
    let mut features = load_features(&feat_path)?;
    let mut config = SelectionConfig::default();
    if let Some(lex) = doc.design_path(&a.lexicon, |d| &d.lexicon) {
        let lex = load_lexicon_file(&lex)?;
        let c = &config.columns;
        derive_columns(
            &mut features,
            Some(&lex),
            [&c.frequency, &c.old20, &c.length],
            1.0,
        )?;
    }
    let candidates = match doc.design_path(&a.candidates, |d| &d.candidates) {
        Some(p) => words_from(&p)?,
        None => features
            .words()
            .iter()
            .filter(|w| embeddings.contains(w))
            .cloned()
            .collect(),
    };
    let seed = a.seed.or(d.seed).unwrap_or(0);
    let k = a.k.or(d.k).unwrap_or(19);
    config.group_size = a.group_size.or(d.group_size).unwrap_or(config.group_size);
    config.sd_threshold = a
        .sd_threshold
        .or(d.sd_threshold)
        .unwrap_or(config.sd_threshold);
    config.matching_tolerance_sd = a
        .tolerance
        .or(d.matching_tolerance_sd)
        .unwrap_or(config.matching_tolerance_sd);
    let (lo, hi) = d.length_range.unwrap_or(config.length_range);
    config.length_range = (a.length_min.unwrap_or(lo), a.length_max.unwrap_or(hi));

    let affinity =
        build_affinity(&embeddings, &candidates, AffinityOptions::default()).map_err(design_err)?;
    let mut options = ClusterOptions::new(k, seed);
    options.n_components = a.n_components.or(d.n_components);
    if let Some(r) = a.restarts.or(d.restarts) {
        options.restarts = r;
    }
    let model = cluster(&affinity, options).map_err(design_err)?;
    let conc = features
        .column(&config.columns.concreteness)
        .ok_or_else(|| {
            CliError::Validation(format!(
                "feature table has no {:?} column",
                config.columns.concreteness
            ))
        })?;
    let target = match a.cluster {
        Some(c) if c < k => c,
        Some(c) => {
            return Err(CliError::Validation(format!(
                "cluster {c} out of range for k = {k}"
            )))
        }
        None => pick_target_cluster(&model, conc).map_err(design_err)?,
    };
    eprintln!(
        "{} candidates, k = {k}, {} components, target cluster {target} ({} words)",
        candidates.len(),
        model.reduced_coords.first().map_or(0, Vec::len),
        model.members(target).len()
    );
    let set = select_stimuli(&model, target, &features, &config, seed).map_err(design_err)?;
    let mut buf = Vec::new();
    write_stimulus_csv(&set, &mut buf).map_err(design_err)?;
    let out = a
        .out
        .as_deref()
        .map(flag_path)
        .or_else(|| d.stimuli.as_deref().map(|p| doc.resolve(p)));
    emit(out.as_deref(), &buf)?;
    let manifest = Manifest::new("stimuli", seed)
        .with("k", k)
        .with("target_cluster", target)
        .with("candidates", candidates.len())
        .with("inertia", model.inertia)
        .with("group_size", config.group_size)
        .with("sd_threshold", config.sd_threshold)
        .with(
            "length_range",
            format!("{}-{}", config.length_range.0, config.length_range.1),
        )
        .with("matching_tolerance_sd", config.matching_tolerance_sd);
    write_manifest(out.as_deref(), &manifest)
}

fn stimulus_words(
    doc: &Document,
    stimuli: &Option<PathBuf>,
    words: &Option<PathBuf>,
) -> Result<Vec<String>> {
    if let Some(p) = words {
        return words_from(&flag_path(p));
    }
    let p = required(
        doc.design_path(stimuli, |d| &d.stimuli),
        "stimulus file (--stimuli or --words)",
    )?;
    Ok(read_stimulus_csv(open(&p)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?
        .words())
}

fn triplet_csv(triplets: &[Triple]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["word_a", "word_b", "word_c"])
        .map_err(CliError::runtime)?;
    for t in triplets {
        w.write_record(t).map_err(CliError::runtime)?;
    }
    w.into_inner().map_err(CliError::runtime)
}

pub fn triplets(doc: &Document, a: &TripletsArgs) -> Result<()> {
    let words = stimulus_words(doc, &a.stimuli, &a.words)?;
    let t = generate_triplets(&words).map_err(design_err)?;
    eprintln!("{} words, {} triplets", words.len(), t.len());
    let out = a
        .out
        .as_deref()
        .map(flag_path)
        .or_else(|| doc.design.triplets.as_deref().map(|p| doc.resolve(p)));
    emit(out.as_deref(), &triplet_csv(&t)?)
}

pub fn schedule(doc: &Document, a: &ScheduleArgs) -> Result<()> {
    let words = stimulus_words(doc, &a.stimuli, &a.words)?;
    let t = generate_triplets(&words).map_err(design_err)?;
    let seed = a.seed.or(doc.design.seed).unwrap_or(0);
    let participants = a.participants.or(doc.design.participants).unwrap_or(40);
    let s = schedule_triplets(&t, participants, seed).map_err(design_err)?;
    let sizes: Vec<usize> = s.blocks.iter().map(Vec::len).collect();
    eprintln!(
        "{} triplets over {participants} participants, blocks of {}..={}",
        t.len(),
        sizes.iter().min().unwrap_or(&0),
        sizes.iter().max().unwrap_or(&0)
    );
    let mut buf = Vec::new();
    write_schedule_csv(&s, &mut buf).map_err(design_err)?;
    let out = a
        .out
        .as_deref()
        .map(flag_path)
        .or_else(|| doc.design.schedule.as_deref().map(|p| doc.resolve(p)));
    emit(out.as_deref(), &buf)?;
    let manifest = Manifest::new("schedule", seed)
        .with("words", words.len())
        .with("triplets", t.len())
        .with("participants", participants);
    write_manifest(out.as_deref(), &manifest)
}

pub fn serve(doc: &Document, a: &ServeArgs) -> Result<()> {
    let cfg = doc.service(&a.service)?;
    let loaded = cfg.load(&doc.base).map_err(CliError::invalid)?;
    let rt = tokio::runtime::Runtime::new().map_err(CliError::runtime)?;
    rt.block_on(lexalign_service::serve(loaded.config, &doc.base))
        .map_err(|e| match e {
            lexalign_service::ServeError::Config(e) => CliError::invalid(e),
            e => CliError::runtime(e),
        })
}

pub fn rdm(a: &RdmArgs) -> Result<()> {
    let judgments = match &a.judgments {
        Some(p) => {
            let p = flag_path(p);
            Some(load_judgments(open(&p)?).map_err(ingest_err(&p))?)
        }
        None => None,
    };
    let words = match (&a.words, &judgments) {
        (Some(p), _) => words_from(&flag_path(p))?,
        (None, Some(j)) => judgment_words(j),
        (None, None) => {
            return Err(CliError::invalid(
                "no word list given (--words, or --judgments)",
            ))
        }
    };
    let rdm = match a.kind {
        RdmKindArg::Behavioral => {
            let j =
                judgments.ok_or_else(|| CliError::invalid("behavioral RDMs need --judgments"))?;
            behavioral_rdm(&j, &words).map_err(CliError::invalid)?
        }
        RdmKindArg::Embedding => {
            let p = flag_path(&required(
                a.embeddings.clone(),
                "embedding file (--embeddings)",
            )?);
            let t = load_embeddings(&p, "rdm", a.merge_duplicates)?;
            embedding_rdm(&t, &words).map_err(CliError::invalid)?
        }
        RdmKindArg::Feature => {
            let p = flag_path(&required(a.features.clone(), "feature table (--features)")?);
            let name = a
                .column
                .as_deref()
                .ok_or_else(|| CliError::invalid("no feature column given (--column)"))?;
            let t = load_features(&p)?;
            let col = t.column(name).ok_or_else(|| {
                CliError::Validation(format!("{}: no column {name:?}", p.display()))
            })?;
            feature_rdm(col, &words).map_err(CliError::invalid)?
        }
    };
    let mut buf = Vec::new();
    if a.condensed {
        write_condensed_csv(&rdm, &mut buf).map_err(CliError::runtime)?;
    } else {
        write_rdm_csv(&rdm, &mut buf).map_err(CliError::runtime)?;
    }
    emit(a.out.as_deref(), &buf)
}

fn read_rdm(p: &Path) -> Result<Rdm> {
    let p = flag_path(p);
    read_rdm_csv(open(&p)?).map_err(rdm_err(&p))
}

pub fn rsa_cmd(a: &RsaArgs) -> Result<()> {
    let target = read_rdm(&a.target)?;
    let model = read_rdm(&a.model)?
        .aligned_to(&target)
        .map_err(CliError::invalid)?;
    let method = match a.permutations {
        Some(n) => PValueMethod::Permutation {
            n_perm: n,
            seed: a.seed,
        },
        None => PValueMethod::Analytic,
    };
    let r = rsa(&target, &model, method).map_err(CliError::runtime)?;
    let mut buf = Vec::new();
    r.write_csv(&mut buf).map_err(CliError::runtime)?;
    emit(a.out.as_deref(), &buf)
}

pub fn partial(a: &PartialArgs) -> Result<()> {
    let target = read_rdm(&a.target)?;
    let x = read_rdm(&a.model)?
        .aligned_to(&target)
        .map_err(CliError::invalid)?;
    let controls: Vec<Rdm> = a
        .controls
        .iter()
        .map(|p| read_rdm(p)?.aligned_to(&target).map_err(CliError::invalid))
        .collect::<Result<_>>()?;
    let refs: Vec<&Rdm> = controls.iter().collect();
    let r = partial_spearman(&target, &x, &refs).map_err(CliError::runtime)?;
    let mut buf = Vec::new();
    r.write_csv(&mut buf).map_err(CliError::runtime)?;
    emit(a.out.as_deref(), &buf)
}

fn validate(cfg: &PipelineConfig, base: &Path) -> Result<()> {
    validate_config(cfg, base).map_err(|errs| {
        CliError::Validation(
            errs.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n"),
        )
    })
}

pub fn ablate(doc: &Document, a: &AblateArgs) -> Result<()> {
    let mut cfg = doc.pipeline(&a.paths)?;
    if !a.features.is_empty() {
        cfg.ablation.features = a.features.clone();
        cfg.ablation.extra_features.clear();
    }
    if let Some(k) = a.folds {
        cfg.ablation.folds = k;
    }
    validate(&cfg, &doc.base)?;
    let inputs = load_inputs(&cfg, &doc.base)?;
    let outcomes = run_ablations(&cfg, &inputs)?;
    let reports: Vec<_> = outcomes.iter().map(|o| o.report.clone()).collect();
    let mut buf = Vec::new();
    write_ablation_csv(&reports, &mut buf).map_err(CliError::runtime)?;
    emit(a.out.as_deref().map(flag_path).as_deref(), &buf)?;
    if let Some(dir) = &a.fits_dir {
        let dir = flag_path(dir);
        for o in &outcomes {
            let mut json = Vec::new();
            o.fit.write_json(&mut json).map_err(CliError::runtime)?;
            let name = format!(
                "ridge_{}_without_{}.json",
                o.report.model_source, o.report.feature_name
            );
            emit(Some(&dir.join(name.replace(['/', '\\', ' '], "_"))), &json)?;
        }
    }
    Ok(())
}

pub fn report(doc: &Document, a: &ReportArgs) -> Result<()> {
    let cfg = doc.pipeline(&a.paths)?;
    validate(&cfg, &doc.base)?;
    let bundle = run_alignment_report(&cfg, &doc.base)?;
    for f in &bundle.files {
        println!("{}", bundle.output_dir.join(f).display());
    }
    Ok(())
}

pub fn validate_cmd(doc: &Document, a: &ReportArgs) -> Result<()> {
    let cfg = doc.pipeline(&a.paths)?;
    match validate_config(&cfg, &doc.base) {
        Ok(()) => {
            println!("config ok");
            Ok(())
        }
        Err(errs) => {
            for e in &errs {
                println!("{e}");
            }
            Err(CliError::Validation(format!(
                "{} problem(s) found",
                errs.len()
            )))
        }
    }
}

pub fn synth(a: &SynthArgs) -> Result<()> {
    let defaults = SynthOptions::default();
    let opts = SynthOptions {
        n_test: a.n_test.unwrap_or(defaults.n_test),
        n_train: a.n_train.unwrap_or(defaults.n_train),
        n_filler: a.n_filler.unwrap_or(defaults.n_filler),
        dim: a.dim.unwrap_or(defaults.dim),
        participants: a.participants.unwrap_or(defaults.participants),
        seed: a.seed,
        ..defaults
    };
    let world = SynthWorld::generate(&opts).map_err(CliError::invalid)?;
    let dir = flag_path(&a.out);
    let files = world.write(&dir).map_err(CliError::runtime)?;
    let mut schedule = Vec::new();
    write_schedule_csv(&world.schedule, &mut schedule).map_err(design_err)?;
    emit(Some(&dir.join("schedule.csv")), &schedule)?;

    let rel = |p: &Path| p.strip_prefix(&dir).unwrap_or(p).to_path_buf();
    let cfg = PipelineConfig {
        output_dir: "report".into(),
        seed: a.seed,
        embeddings: files
            .embeddings
            .iter()
            .map(|(name, p)| EmbeddingSource {
                name: name.clone(),
                path: rel(p),
                merge_duplicates: false,
            })
            .collect(),
        inputs: lexalign::report::InputPaths {
            features: rel(&files.features),
            judgments: rel(&files.judgments),
            ratings: Some(rel(&files.ratings)),
            lexicon: None,
            train_words: Some(rel(&files.train_words)),
            test_words: Some(rel(&files.test_words)),
        },
        columns: Default::default(),
        stats: Default::default(),
        ablation: Default::default(),
    };
    let mut text = cfg.to_toml();
    text.push_str("\n[service]\nschedule = \"schedule.csv\"\ndata_dir = \"study\"\n");
    text.push_str(&format!("seed = {}\n", a.seed));
    emit(Some(&dir.join("lexalign.toml")), text.as_bytes())?;
    eprintln!(
        "wrote a world of {} test and {} training words ({} judgments) to {}",
        world.test_words.len(),
        world.train_words.len(),
        world.judgments.len(),
        dir.display()
    );
    Ok(())
}
