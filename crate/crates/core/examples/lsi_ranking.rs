//! LSI finds documents related through shared context even without a
//! common term; compare with the VSM cosine scores.

use bugloc::models::{Corpus, IdfMode, LsiModel, Similarity, TermWeight, VsmIndex};
use bugloc::textprep::Document;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let docs = vec![
        Document::from_terms("a", ["heap", "alloc", "leak"]),
        Document::from_terms("b", ["alloc", "leak", "pool", "buffer"]),
        Document::from_terms("c", ["pool", "buffer", "reuse"]),
        Document::from_terms("d", ["render", "font", "glyph"]),
        Document::from_terms("e", ["glyph", "cache", "font"]),
    ];
    let corpus = Corpus::from_documents(docs, vec![10; 5]);
    let query = Document::from_terms("q", ["heap", "leak"]);

    let vsm =
        VsmIndex::new(&corpus, TermWeight::TfIdf, IdfMode::Log).scores(&query, Similarity::Cosine);
    let model = LsiModel::train(&corpus, TermWeight::TfIdf, IdfMode::Log, 256, 0)?;
    println!("weighted matrix rank: {}", model.rank());
    println!("vsm      {}", fmt(&vsm));
    for k in 1..=model.rank() {
        println!("lsi k={k}  {}", fmt(&model.scores(&corpus, &query, k)?));
    }
    Ok(())
}

fn fmt(scores: &[f64]) -> String {
    scores
        .iter()
        .map(|s| format!("{s:>7.3}"))
        .collect::<Vec<_>>()
        .join(" ")
}
