use std::collections::HashSet;

use crate::corpus::Example;
use crate::error::Result;
use crate::lexicon::{LexemeId, Lexicon};
use crate::metrics::{join, tokenize, Prediction};

/// Entity tokens of `explanation` whose lexeme (either number) is absent
/// from the premise and hypothesis.
pub fn hallucinated_entities(explanation: &str, premise: &str, hypothesis: &str, lexicon: &Lexicon) -> Vec<String> {
    let input: HashSet<LexemeId> = tokenize(premise)
        .iter()
        .chain(&tokenize(hypothesis))
        .flat_map(|t| lexicon.entity_lexemes(t).collect::<Vec<_>>())
        .collect();
    tokenize(explanation)
        .into_iter()
        .filter(|t| lexicon.is_entity_token(t) && !lexicon.entity_lexemes(t).any(|id| input.contains(&id)))
        .collect()
}

pub fn is_hallucinated(explanation: &str, premise: &str, hypothesis: &str, lexicon: &Lexicon) -> bool {
    !hallucinated_entities(explanation, premise, hypothesis, lexicon).is_empty()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HallucinationResult {
    /// `(example_id, flagged)` for every prediction with an explanation.
    pub flags: Vec<(String, bool)>,
    pub flagged: usize,
    pub scored: usize,
}

impl HallucinationResult {
    pub fn rate(&self) -> Option<f64> {
        (self.scored > 0).then(|| self.flagged as f64 / self.scored as f64)
    }
}

pub fn hallucination(predictions: &[Prediction], gold: &[Example], lexicon: &Lexicon) -> Result<HallucinationResult> {
    let mut flags = Vec::new();
    for (p, g) in join(predictions, gold)? {
        if let Some(expl) = &p.generated_explanation {
            flags.push((p.example_id.clone(), is_hallucinated(expl, &g.premise, &g.hypothesis, lexicon)));
        }
    }
    let flagged = flags.iter().filter(|(_, f)| *f).count();
    Ok(HallucinationResult {
        scored: flags.len(),
        flagged,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_normalized() {
        let lex = Lexicon::starter();
        let p = "the psychologist by the programmers saw the essayist .";
        let h = "the psychologist saw the essayist .";
        assert!(!is_hallucinated("the psychologists are still the programmer .", p, h, &lex));
        assert_eq!(hallucinated_entities("the musician saw the essayist .", p, h, &lex), ["musician"]);
        assert!(!is_hallucinated("we do not know .", p, h, &lex));
        assert!(!is_hallucinated("the unicorn saw the essayist .", p, h, &lex));
    }

    #[test]
    fn ood_vocab_example() {
        let lex = Lexicon::starter();
        let p = "the chaplains near the singer needed the author .";
        let h = "the chaplains needed the author .";
        let g = "the psychologists are in front of the musician and the strategists helped the writer , we do not know whether the illustrators helped the writer .";
        let got = hallucinated_entities(g, p, h, &lex);
        assert_eq!(got, ["psychologists", "musician", "strategists", "writer", "illustrators", "writer"]);
    }
}
