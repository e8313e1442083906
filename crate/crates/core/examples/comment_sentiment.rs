//! Scores comments with the bundled lexicon and aggregates them per cover.
//!
//! Set `COVERLENS_LEXICON` to a `token<TAB>valence` file to use another word list.

use coverlens::{aggregate_scores, score_comment, SentimentLexicon};

fn main() -> coverlens::Result<()> {
    let lex = SentimentLexicon::from_env_or_bundled()?;
    let comments = [
        "I love this cover, the vocals are amazing",
        "not bad at all",
        "honestly really boring compared to the original",
        "uploaded on a tuesday",
    ];
    let scores: Vec<f64> = comments.iter().map(|c| score_comment(c, &lex)).collect();
    for (c, s) in comments.iter().zip(&scores) {
        println!("{s:>6.2}  {c}");
    }
    println!("label for this cover: {:.2}", aggregate_scores(&scores)?);
    Ok(())
}
