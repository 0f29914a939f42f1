use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cnl::{NLScript, NL_VAR};
use crate::fol::{Formula, FormulaSet, Literal, Term};
use crate::lexicon::{words_of, Lexicon, SymbolClass};

use super::{Distractors, GeneratorConfig, Ontology, Problem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("vocabulary exhausted: {0}")]
    Vocabulary(String),
}

/// Real subclass chains, most specific first.
const TAXONOMIES: &[&[&str]] = &[
    &[
        "natural_number",
        "integer",
        "rational_number",
        "real_number",
        "number",
    ],
    &[
        "prime_number",
        "natural_number",
        "integer",
        "rational_number",
    ],
    &[
        "composite_number",
        "natural_number",
        "integer",
        "real_number",
    ],
    &[
        "even_number",
        "integer",
        "rational_number",
        "real_number",
        "number",
    ],
    &["negative_number", "real_number", "complex_number", "number"],
    &["fraction", "rational_number", "real_number", "number"],
    &["imaginary_number", "complex_number", "number"],
    &[
        "tabby",
        "cat",
        "feline",
        "carnivore",
        "mammal",
        "vertebrate",
        "animal",
    ],
    &["dog", "carnivore", "mammal", "vertebrate", "animal"],
    &["whale", "mammal", "vertebrate", "animal"],
    &["cow", "mammal", "vertebrate", "animal"],
    &["rabbit", "mammal", "vertebrate", "animal"],
    &["sheep", "mammal", "vertebrate", "animal"],
    &["snake", "reptile", "vertebrate", "animal"],
    &["bird", "vertebrate", "animal"],
    &[
        "butterfly",
        "lepidopteran",
        "insect",
        "arthropod",
        "invertebrate",
        "animal",
    ],
    &["spider", "arthropod", "invertebrate", "animal"],
];

/// Whether `sub` is below `sup` in some real taxonomy.
fn really_below(sub: &str, sup: &str) -> bool {
    TAXONOMIES.iter().any(|t| {
        match (
            t.iter().position(|x| *x == sub),
            t.iter().position(|x| *x == sup),
        ) {
            (Some(i), Some(j)) => i < j,
            _ => false,
        }
    })
}

#[derive(Debug, Clone)]
enum Property {
    Adjective(String),
    /// Stem and third-person form.
    Verb(String, String),
}

impl Property {
    fn predicate(&self) -> &str {
        match self {
            Property::Adjective(a) => a,
            Property::Verb(stem, _) => stem,
        }
    }
}

struct Vocabulary<'a> {
    lex: &'a Lexicon,
    nouns: Vec<&'static str>,
    properties: Vec<Property>,
    names: Vec<String>,
}

impl<'a> Vocabulary<'a> {
    fn new(lex: &'a Lexicon) -> Result<Self, GenerateError> {
        let mut nouns: Vec<&'static str> = Vec::new();
        for t in TAXONOMIES {
            for n in *t {
                if !nouns.contains(n) {
                    nouns.push(n);
                }
            }
        }
        if let Some(missing) = nouns
            .iter()
            .find(|n| lex.classify(n) != SymbolClass::SingularNoun)
        {
            return Err(GenerateError::Vocabulary(format!(
                "lexicon lacks noun `{missing}`"
            )));
        }
        let mut properties: Vec<Property> = lex
            .properties()
            .map(|a| Property::Adjective(a.to_string()))
            .collect();
        properties.extend(
            lex.verbs()
                .map(|(v, s)| Property::Verb(s.to_string(), v.to_string())),
        );
        Ok(Vocabulary {
            lex,
            nouns,
            properties,
            names: lex.proper_nouns().map(str::to_string).collect(),
        })
    }

    fn plural(&self, noun: &str) -> String {
        words_of(self.lex.plural(noun).unwrap_or(noun))
    }
}

fn article(words: &str) -> &'static str {
    if words.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// What a sentence says about its subject.
enum Predicate<'p> {
    Class(&'p str),
    Prop(&'p Property),
}

struct Writer<'v, 'a, R: Rng> {
    vocab: &'v Vocabulary<'a>,
    rng: &'v mut R,
}

impl<R: Rng> Writer<'_, '_, R> {
    fn singular_vp(&mut self, positive: bool, pred: &Predicate) -> String {
        let not = if positive { "" } else { "not " };
        match pred {
            Predicate::Class(n) => match self.vocab.lex.adjective_of(n) {
                Some(adj) if self.rng.gen_bool(0.3) => format!("is {not}{adj}"),
                _ => {
                    let w = words_of(n);
                    format!("is {not}{} {w}", article(&w))
                }
            },
            Predicate::Prop(Property::Adjective(a)) => format!("is {not}{a}"),
            Predicate::Prop(Property::Verb(stem, third)) => {
                if positive {
                    third.clone()
                } else {
                    format!("does not {stem}")
                }
            }
        }
    }

    fn plural_vp(&mut self, positive: bool, pred: &Predicate) -> String {
        let not = if positive { "" } else { "not " };
        match pred {
            Predicate::Class(n) => match self.vocab.lex.adjective_of(n) {
                Some(adj) if self.rng.gen_bool(0.3) => format!("are {not}{adj}"),
                _ => format!("are {not}{}", self.vocab.plural(n)),
            },
            Predicate::Prop(Property::Adjective(a)) => format!("are {not}{a}"),
            Predicate::Prop(Property::Verb(stem, _)) => {
                if positive {
                    stem.clone()
                } else {
                    format!("do not {stem}")
                }
            }
        }
    }

    /// A universally quantified sentence in one of the accepted phrasings.
    fn rule(&mut self, class: &str, positive: bool, pred: &Predicate) -> String {
        let sg = words_of(class);
        let body = match self.rng.gen_range(0..6) {
            0 => format!("Every {sg} {}", self.singular_vp(positive, pred)),
            1 => format!("Each {sg} {}", self.singular_vp(positive, pred)),
            2 => format!("Any {sg} {}", self.singular_vp(positive, pred)),
            3 => format!(
                "All {} {}",
                self.vocab.plural(class),
                self.plural_vp(positive, pred)
            ),
            4 if !positive => format!("No {sg} {}", self.singular_vp(true, pred)),
            _ => format!(
                "{} {}",
                capitalize(&self.vocab.plural(class)),
                self.plural_vp(positive, pred)
            ),
        };
        body + "."
    }

    fn fact(&mut self, name: &str, positive: bool, pred: &Predicate) -> String {
        format!("{} {}.", capitalize(name), self.singular_vp(positive, pred))
    }
}

fn rule_formula(class: &str, positive: bool, pred: &str) -> Formula {
    Formula::rule(NL_VAR, class, positive, pred)
}

fn fact_formula(name: &str, positive: bool, pred: &str) -> Formula {
    Formula::ground(Literal::new(positive, pred, Term::constant(name)))
}

fn pick_chain<R: Rng>(
    vocab: &Vocabulary,
    ontology: Ontology,
    len: usize,
    rng: &mut R,
) -> Option<Vec<&'static str>> {
    match ontology {
        Ontology::True => {
            let windows: Vec<&[&str]> = TAXONOMIES.iter().flat_map(|t| t.windows(len)).collect();
            windows.choose(rng).map(|w| w.to_vec())
        }
        Ontology::False => {
            for _ in 0..200 {
                let chain: Vec<&str> = vocab.nouns.choose_multiple(rng, len).copied().collect();
                let fake = chain
                    .windows(2)
                    .all(|w| !really_below(w[0], w[1]) && !really_below(w[1], w[0]));
                if chain.len() == len && fake {
                    return Some(chain);
                }
            }
            None
        }
    }
}

fn generate_one(
    config: &GeneratorConfig,
    index: usize,
    vocab: &Vocabulary,
) -> Result<Problem, GenerateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let hops = config.hops as usize;

    let chain = pick_chain(vocab, config.ontology, hops, &mut rng)
        .ok_or_else(|| GenerateError::Vocabulary(format!("no class chain of length {hops}")))?;
    let mut used_classes: HashSet<&str> = chain.iter().copied().collect();
    let name = vocab
        .names
        .choose(&mut rng)
        .ok_or_else(|| GenerateError::Vocabulary("no proper nouns".into()))?
        .clone();
    let n_props = if config.distractors == Distractors::Relevant {
        4
    } else {
        1
    };
    let props: Vec<&Property> = vocab
        .properties
        .choose_multiple(&mut rng, n_props)
        .collect();
    if props.len() < n_props {
        return Err(GenerateError::Vocabulary(format!(
            "need {n_props} distinct properties"
        )));
    }
    let main = props[0];
    let s = rng.gen_bool(0.5);
    let q = rng.gen_bool(0.5);

    let mut w = Writer {
        vocab,
        rng: &mut rng,
    };
    let mut items: Vec<(String, Formula)> = Vec::new();
    let mut proof = Vec::new();

    let membership = (
        w.fact(&name, true, &Predicate::Class(chain[0])),
        fact_formula(&name, true, chain[0]),
    );
    proof.push(membership.1.clone());
    items.push(membership);
    for pair in chain.windows(2) {
        let item = (
            w.rule(pair[0], true, &Predicate::Class(pair[1])),
            rule_formula(pair[0], true, pair[1]),
        );
        proof.push(item.1.clone());
        items.push(item);
    }
    let top = chain[hops - 1];
    let prop_rule = (
        w.rule(top, s, &Predicate::Prop(main)),
        rule_formula(top, s, main.predicate()),
    );
    proof.push(prop_rule.1.clone());
    items.push(prop_rule);

    if config.distractors == Distractors::Relevant {
        let mut fresh_class = |w: &mut Writer<ChaCha8Rng>| -> Result<&'static str, GenerateError> {
            let free: Vec<&&str> = vocab
                .nouns
                .iter()
                .filter(|n| !used_classes.contains(**n))
                .collect();
            let c = **free.choose(w.rng).ok_or_else(|| {
                GenerateError::Vocabulary("not enough classes for distractors".into())
            })?;
            used_classes.insert(c);
            Ok(c)
        };
        // an unrelated class with the opposite property
        let d = fresh_class(&mut w)?;
        items.push((
            w.rule(d, !s, &Predicate::Prop(main)),
            rule_formula(d, !s, main.predicate()),
        ));
        // another property of some chain class
        let c = chain[w.rng.gen_range(0..hops)];
        let pol = w.rng.gen_bool(0.5);
        items.push((
            w.rule(c, pol, &Predicate::Prop(props[1])),
            rule_formula(c, pol, props[1].predicate()),
        ));
        // a second superclass off the chain, with its own property
        let c = chain[w.rng.gen_range(0..hops)];
        let b = fresh_class(&mut w)?;
        items.push((
            w.rule(c, true, &Predicate::Class(b)),
            rule_formula(c, true, b),
        ));
        let pol = w.rng.gen_bool(0.5);
        items.push((
            w.rule(b, pol, &Predicate::Prop(props[2])),
            rule_formula(b, pol, props[2].predicate()),
        ));
        // the individual belongs to a further class
        let e = fresh_class(&mut w)?;
        items.push((
            w.fact(&name, true, &Predicate::Class(e)),
            fact_formula(&name, true, e),
        ));
        let pol = w.rng.gen_bool(0.5);
        items.push((
            w.rule(e, pol, &Predicate::Prop(props[3])),
            rule_formula(e, pol, props[3].predicate()),
        ));
    }

    items.shuffle(w.rng);
    let query_text = format!(
        "True or false: {}",
        w.fact(&name, q, &Predicate::Prop(main))
    );
    let (statements, gold_ax): (Vec<String>, Vec<Formula>) = items.into_iter().unzip();
    Ok(Problem {
        id: format!(
            "{}-{}-h{}-s{}-{:04}",
            config.ontology, config.distractors, config.hops, config.seed, index
        ),
        nl: NLScript {
            statements,
            query_sentence: query_text,
        },
        gold_ax: gold_ax.into_iter().collect::<FormulaSet>(),
        query: fact_formula(&name, q, main.predicate()),
        gold_answer: q == s,
        proof,
        config: Some(*config),
    })
}

/// Generate `config.count` problems. Output depends only on the config and
/// the lexicon.
pub fn generate(config: &GeneratorConfig, lex: &Lexicon) -> Result<Vec<Problem>, GenerateError> {
    if !(1..=3).contains(&config.hops) {
        return Err(GenerateError::InvalidConfig(format!(
            "hops must be 1..=3, got {}",
            config.hops
        )));
    }
    if config.count == 0 {
        return Err(GenerateError::InvalidConfig(
            "count must be positive".into(),
        ));
    }
    let vocab = Vocabulary::new(lex)?;
    (0..config.count)
        .into_par_iter()
        .map(|i| generate_one(config, i, &vocab))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::to_jsonl;
    use crate::entailment::is_entailed;
    use crate::reasoner::evaluate_gold;

    fn cfg(hops: u8, ontology: Ontology, distractors: Distractors) -> GeneratorConfig {
        GeneratorConfig {
            hops,
            ontology,
            distractors,
            count: 60,
            seed: 11,
        }
    }

    #[test]
    fn text_parses_to_gold() {
        let lex = Lexicon::builtin();
        for hops in 1..=3 {
            for ont in [Ontology::True, Ontology::False] {
                for d in [Distractors::None, Distractors::Relevant] {
                    for p in generate(&cfg(hops, ont, d), &lex).unwrap() {
                        let parsed = p.parse(&lex).unwrap_or_else(|e| panic!("{}: {e}", p.id));
                        assert!(
                            parsed.nl_ax.same_members(&p.gold_ax),
                            "{}: {:?}",
                            p.id,
                            p.nl
                        );
                        assert_eq!(parsed.query, p.query);
                        assert_eq!(evaluate_gold(&p).unwrap(), p.gold_answer, "{}", p.id);
                    }
                }
            }
        }
    }

    #[test]
    fn one_hop_without_distractors() {
        let ps = generate(
            &cfg(1, Ontology::True, Distractors::None),
            &Lexicon::builtin(),
        )
        .unwrap();
        for p in &ps {
            assert_eq!(p.gold_ax.len(), 2);
            assert_eq!(p.proof.len(), 2);
        }
    }

    #[test]
    fn deterministic_and_balanced() {
        let lex = Lexicon::builtin();
        let c = GeneratorConfig {
            count: 100,
            seed: 42,
            ..Default::default()
        };
        let a = generate(&c, &lex).unwrap();
        let b = generate(&c, &lex).unwrap();
        assert_eq!(to_jsonl(&a), to_jsonl(&b));
        let trues = a.iter().filter(|p| p.gold_answer).count();
        assert!((35..=65).contains(&trues), "{trues}");
        let other = generate(&GeneratorConfig { seed: 43, ..c }, &lex).unwrap();
        assert_ne!(to_jsonl(&a), to_jsonl(&other));
    }

    #[test]
    fn proof_chain_is_minimal() {
        let lex = Lexicon::builtin();
        for p in generate(&cfg(3, Ontology::False, Distractors::Relevant), &lex).unwrap() {
            if !p.gold_answer {
                continue;
            }
            for step in &p.proof {
                let mut ax = p.gold_ax.clone();
                ax.remove(step);
                assert!(
                    !is_entailed(&ax, &p.query).unwrap(),
                    "{} still provable without {step}",
                    p.id
                );
            }
        }
    }

    #[test]
    fn false_ontology_avoids_real_links() {
        let lex = Lexicon::builtin();
        for p in generate(&cfg(3, Ontology::False, Distractors::None), &lex).unwrap() {
            for f in &p.proof[1..p.proof.len() - 1] {
                let preds = f.predicates();
                assert!(!really_below(preds[0], preds[1]), "{f}");
            }
        }
    }

    #[test]
    fn bad_config() {
        let lex = Lexicon::builtin();
        assert!(generate(
            &GeneratorConfig {
                hops: 4,
                ..Default::default()
            },
            &lex
        )
        .is_err());
        assert!(generate(
            &GeneratorConfig {
                count: 0,
                ..Default::default()
            },
            &lex
        )
        .is_err());
        let tiny = crate::lexicon::load_lexicon("[nouns]\ncat,cats\n").unwrap();
        assert!(matches!(
            generate(&GeneratorConfig::default(), &tiny),
            Err(GenerateError::Vocabulary(_))
        ));
    }
}
