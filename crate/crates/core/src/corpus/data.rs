//! Bundled corpus files. Paths mirror the `corpus/` directory of the crate.

pub(super) const ENTRIES: &[&str] = &[
    include_str!("../../corpus/entries/chain.3.json"),
    include_str!("../../corpus/entries/cisoex.1.json"),
    include_str!("../../corpus/entries/conjunctions.1.json"),
    include_str!("../../corpus/entries/conjunctions.2.json"),
    include_str!("../../corpus/entries/conjunctions.3.json"),
    include_str!("../../corpus/entries/disjunction.1.json"),
    include_str!("../../corpus/entries/disjunction.2.json"),
    include_str!("../../corpus/entries/disjunction.3.json"),
    include_str!("../../corpus/entries/disjunction.4.json"),
    include_str!("../../corpus/entries/iif.1.json"),
    include_str!("../../corpus/entries/iif.2.json"),
    include_str!("../../corpus/entries/implications.1.json"),
    include_str!("../../corpus/entries/implications.2.json"),
    include_str!("../../corpus/entries/implications.3.json"),
    include_str!("../../corpus/entries/implicationsecrecy.1.json"),
    include_str!("../../corpus/entries/implicationsecrecy.2.json"),
    include_str!("../../corpus/entries/iterated.1.json"),
    include_str!("../../corpus/entries/iterated.2.json"),
    include_str!("../../corpus/entries/iterated.3.json"),
    include_str!("../../corpus/entries/nonmonotonic.1.json"),
    include_str!("../../corpus/entries/nonproperties.1.json"),
    include_str!("../../corpus/entries/nonproperties.2.json"),
    include_str!("../../corpus/entries/nonproperties.3.json"),
    include_str!("../../corpus/entries/nonproperties.4.json"),
    include_str!("../../corpus/entries/nonproperties.5.json"),
    include_str!("../../corpus/entries/notnegcompl.1.json"),
    include_str!("../../corpus/entries/notnegcompl.2.json"),
    include_str!("../../corpus/entries/notperfsecret.1.json"),
    include_str!("../../corpus/entries/notperfsecret.2.json"),
    include_str!("../../corpus/entries/notrivializ.1.json"),
    include_str!("../../corpus/entries/notrivializ.2.json"),
    include_str!("../../corpus/entries/notrivializ.3.json"),
    include_str!("../../corpus/entries/propertiessab.1.json"),
    include_str!("../../corpus/entries/propertiessab.2.json"),
    include_str!("../../corpus/entries/propertiessab.3.json"),
    include_str!("../../corpus/entries/propertiessab.4.json"),
    include_str!("../../corpus/entries/propertiessab.5.json"),
    include_str!("../../corpus/entries/propertiessab.6.json"),
    include_str!("../../corpus/entries/propertiessab.7.json"),
    include_str!("../../corpus/entries/propertiessab.8.json"),
    include_str!("../../corpus/entries/propertiessab.9.json"),
    include_str!("../../corpus/entries/propertiessab2.1.json"),
    include_str!("../../corpus/entries/propertiessab2.2.json"),
    include_str!("../../corpus/entries/propertiessab2.3.json"),
    include_str!("../../corpus/entries/remark4.1.json"),
    include_str!("../../corpus/entries/rev1.1.json"),
    include_str!("../../corpus/entries/rev2.1.json"),
    include_str!("../../corpus/entries/threeagents.1.json"),
    include_str!("../../corpus/entries/threeagents.2.json"),
    include_str!("../../corpus/entries/threeagents.3.json"),
    include_str!("../../corpus/entries/threeagents.4.json"),
    include_str!("../../corpus/entries/threeagents.5.json"),
    include_str!("../../corpus/entries/threeagents.6.json"),
    include_str!("../../corpus/entries/threeagents.7.json"),
    include_str!("../../corpus/entries/zkproof.1.json"),
];

pub(super) const MODELS: &[(&str, &str)] = &[
    (
        "models/nonmonotonic.json",
        include_str!("../../corpus/models/nonmonotonic.json"),
    ),
    (
        "models/notnegcompl.json",
        include_str!("../../corpus/models/notnegcompl.json"),
    ),
    (
        "models/notperfsecret.json",
        include_str!("../../corpus/models/notperfsecret.json"),
    ),
    (
        "models/notrivializ.json",
        include_str!("../../corpus/models/notrivializ.json"),
    ),
    (
        "models/notrivializ3.json",
        include_str!("../../corpus/models/notrivializ3.json"),
    ),
    (
        "models/rev2.json",
        include_str!("../../corpus/models/rev2.json"),
    ),
    (
        "models/search_disjunction3.json",
        include_str!("../../corpus/models/search_disjunction3.json"),
    ),
    (
        "models/search_disjunction4.json",
        include_str!("../../corpus/models/search_disjunction4.json"),
    ),
    (
        "models/search_iif.json",
        include_str!("../../corpus/models/search_iif.json"),
    ),
    (
        "models/search_nonproperties1.json",
        include_str!("../../corpus/models/search_nonproperties1.json"),
    ),
    (
        "models/search_nonproperties2.json",
        include_str!("../../corpus/models/search_nonproperties2.json"),
    ),
    (
        "models/search_nonproperties3.json",
        include_str!("../../corpus/models/search_nonproperties3.json"),
    ),
    (
        "models/search_nonproperties4.json",
        include_str!("../../corpus/models/search_nonproperties4.json"),
    ),
    (
        "models/search_nonproperties5.json",
        include_str!("../../corpus/models/search_nonproperties5.json"),
    ),
    (
        "models/search_notnegcompl2.json",
        include_str!("../../corpus/models/search_notnegcompl2.json"),
    ),
    (
        "models/threeagents6.json",
        include_str!("../../corpus/models/threeagents6.json"),
    ),
    (
        "models/threeagents7.json",
        include_str!("../../corpus/models/threeagents7.json"),
    ),
    (
        "models/zkproof.json",
        include_str!("../../corpus/models/zkproof.json"),
    ),
];
