//! The small information-technology grammar and knowledge base used by the
//! unit tests. The `parsetalk` crate ships the same content as JSON.

use crate::features::FeatureStructure as Fs;
use crate::grammar::{ClassSpec as C, Direction::*, Grammar, LexemeSpec as L, PredictionSlot, ValencySpec as V};
use crate::kb::Kb;

fn fs(pairs: &[(&str, &str)]) -> Fs {
    pairs.iter().fold(Fs::new(), |f, (k, v)| f.with(k, v))
}

/// Surface, class, features, concept.
type Entry<'a> = (&'a str, &'a str, &'a [(&'a str, &'a str)], Option<&'a str>);

pub fn grammar() -> Grammar {
    let mut b = Grammar::builder()
        .class(C::new("Word", None))
        .class(C::new("Nominal", Some("Word")))
        .class(
            C::new("Noun", Some("Nominal"))
                .valency(V::new("det", ModifierPrecedes, "Det"))
                .valency(
                    V::new("amod", ModifierPrecedes, "Adjective")
                        .features(fs(&[("pred", "-")]))
                        .role("HAS-PROPERTY"),
                )
                .valency(pp("pp-for", "for", "PRICE-OF-PRODUCT"))
                .valency(pp("pp-with", "with", "HAS-PART"))
                .valency(pp("pp-of", "of", "TOPIC")),
        )
        .class(C::new("ProperNoun", Some("Nominal")))
        .class(C::new("Amount", Some("Nominal")))
        .class(C::new("Det", Some("Word")).predicts(PredictionSlot::Head, "Nominal", true))
        .class(
            C::new("Adjective", Some("Word"))
                .features(fs(&[("pred", "-")]))
                .valency(V::new("advmod", ModifierPrecedes, "Adverb")),
        )
        .class(C::new("Adverb", Some("Word")))
        .class(
            C::new("Prep", Some("Word"))
                .valency(V::new("pobj", ModifierFollows, "Nominal").mandatory())
                .predicts(PredictionSlot::Modifier, "Nominal", true),
        )
        .class(
            C::new("Verb", Some("Word"))
                .valency(V::new("subj", ModifierPrecedes, "Nominal").role("AGENT"))
                .valency(V::new("punct", ModifierFollows, "Punct"))
                .valency(pp("pp-in", "in", "LOCATION")),
        )
        .class(
            C::new("TransVerb", Some("Verb"))
                .valency(V::new("obj", ModifierFollows, "Nominal").role("PATIENT"))
                .valency(pp("pp-for", "for", "PRICE-OF-SALE"))
                .valency(pp("pp-to", "to", "RECIPIENT"))
                .valency(V::new("pred", ModifierFollows, "Adjective").features(fs(&[("pred", "+")]))),
        )
        .class(C::new("IntransVerb", Some("Verb")).valency(V::new("subj", ModifierPrecedes, "Nominal").role("THEME")))
        .class(C::new("Punct", Some("Word")));

    let sg = [("num", "sg")];
    let pl = [("num", "pl")];
    let lexicon: &[Entry] = &[
        ("Zenon", "ProperNoun", &sg, Some("ZENON")),
        ("Berlin", "ProperNoun", &sg, Some("CITY")),
        ("sells", "TransVerb", &sg, Some("SELL")),
        ("sell", "TransVerb", &pl, Some("SELL")),
        ("buys", "TransVerb", &sg, Some("BUY")),
        ("bought", "TransVerb", &[], Some("BUY")),
        ("appeared", "IntransVerb", &[], Some("APPEAR")),
        ("printer", "Noun", &sg, Some("PRINTER")),
        ("printers", "Noun", &pl, Some("PRINTER")),
        ("notebook", "Noun", &sg, Some("NOTEBOOK")),
        ("notebooks", "Noun", &pl, Some("NOTEBOOK")),
        ("monitor", "Noun", &sg, Some("MONITOR")),
        ("disk", "Noun", &sg, Some("DISK")),
        ("memory", "Noun", &sg, Some("MEMORY")),
        ("customer", "Noun", &sg, Some("CUSTOMER")),
        ("customers", "Noun", &pl, Some("CUSTOMER")),
        ("company", "Noun", &sg, Some("COMPANY")),
        ("review", "Noun", &sg, Some("REVIEW")),
        ("silver", "Noun", &sg, Some("SILVERWARE")),
        ("silver", "Adjective", &[], Some("SILVER-COLOR")),
        ("new", "Adjective", &[], Some("NEW")),
        ("fast", "Adjective", &[], Some("FAST")),
        ("cheap", "Adjective", &[], Some("CHEAP")),
        ("over-priced", "Adjective", &[("pred", "+")], Some("OVERPRICED")),
        ("very", "Adverb", &[], None),
        ("this", "Det", &[("def", "+"), ("num", "sg")], None),
        ("these", "Det", &[("def", "+"), ("num", "pl")], None),
        ("the", "Det", &[("def", "+")], None),
        ("a", "Det", &[("def", "-"), ("num", "sg")], None),
        ("for", "Prep", &[("pform", "for")], None),
        ("with", "Prep", &[("pform", "with")], None),
        ("of", "Prep", &[("pform", "of")], None),
        ("to", "Prep", &[("pform", "to")], None),
        ("in", "Prep", &[("pform", "in")], None),
        ("$2,000", "Amount", &[], Some("MONEY")),
        ("$500", "Amount", &[], Some("MONEY")),
        (".", "Punct", &[], None),
        (",", "Punct", &[], None),
    ];
    for (surface, class, features, concept) in lexicon {
        let mut l = L::new(surface, class).features(fs(features));
        if let Some(c) = concept {
            l = l.concept(c);
        }
        b.add_lexeme(l);
    }
    b.build().unwrap()
}

fn pp(label: &str, pform: &str, role: &str) -> V {
    V::new(label, ModifierFollows, "Prep")
        .features(fs(&[("pform", pform)]))
        .role(role)
}

pub fn kb() -> Kb {
    Kb::builder()
        .concept("ACTION", &[])
        .concept("TRANSACTION", &["ACTION"])
        .concept("SELL", &["TRANSACTION"])
        .concept("BUY", &["TRANSACTION"])
        .concept("APPEAR", &["ACTION"])
        .concept("AGENTIVE", &[])
        .concept("ORGANIZATION", &["AGENTIVE"])
        .concept("COMPANY", &["ORGANIZATION"])
        .concept("ZENON", &["COMPANY"])
        .concept("PERSON", &["AGENTIVE"])
        .concept("CUSTOMER", &["PERSON"])
        .concept("PRODUCT", &[])
        .concept("HARDWARE", &["PRODUCT"])
        .concept("PRINTER", &["HARDWARE"])
        .concept("NOTEBOOK", &["HARDWARE"])
        .concept("MONITOR", &["HARDWARE"])
        .concept("COMPONENT", &["HARDWARE"])
        .concept("DISK", &["COMPONENT"])
        .concept("MEMORY", &["COMPONENT"])
        .concept("SILVERWARE", &["PRODUCT"])
        .concept("MONEY", &[])
        .concept("PROPERTY", &[])
        .concept("COLOR", &["PROPERTY"])
        .concept("SILVER-COLOR", &["COLOR"])
        .concept("QUALITY", &["PROPERTY"])
        .concept("NEW", &["QUALITY"])
        .concept("FAST", &["QUALITY"])
        .concept("CHEAP", &["QUALITY"])
        .concept("OVERPRICED", &["QUALITY"])
        .concept("DOCUMENT", &[])
        .concept("REVIEW", &["DOCUMENT"])
        .concept("PLACE", &[])
        .concept("CITY", &["PLACE"])
        .role("AGENT", "TRANSACTION", "AGENTIVE")
        .role("THEME", "ACTION", "THING")
        .role("PATIENT", "TRANSACTION", "PRODUCT")
        .role("PRICE-OF-SALE", "TRANSACTION", "MONEY")
        .role("PRICE-OF-PRODUCT", "PRODUCT", "MONEY")
        .role("HAS-PROPERTY", "PRODUCT", "PROPERTY")
        .role("HAS-PART", "HARDWARE", "COMPONENT")
        .role("TOPIC", "DOCUMENT", "THING")
        .role("RECIPIENT", "TRANSACTION", "AGENTIVE")
        .role("LOCATION", "ACTION", "PLACE")
        .build()
        .unwrap()
}
