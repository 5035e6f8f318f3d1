//! Reference examples for the starter registry.
//!
//! Reference strings keep their original punctuation ("essayist."); rendered
//! strings are token-joined ("essayist .").

use templex::lexicon::Partition;
use templex::template::Label;

pub struct Case {
    pub template: &'static str,
    pub binding: &'static [(&'static str, &'static str)],
    pub premise: &'static str,
    pub hypothesis: &'static str,
    pub explanation: &'static str,
    pub label: Label,
    pub vocab: Partition,
}

pub const CASES: &[Case] = &[
    Case {
        template: "le_around_prepositional_phrase_01",
        binding: &[("X", "psychologist"), ("P", "by"), ("Y", "programmer"), ("V", "see"), ("Z", "essayist")],
        premise: "the psychologist by the programmers saw the essayist.",
        hypothesis: "the psychologist saw the essayist.",
        explanation: "the psychologist by the programmers is still the psychologist.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_around_relative_clause_05",
        binding: &[("X", "scientist"), ("I", "talk"), ("V", "thank"), ("Z", "psychotherapist")],
        premise: "the scientists that talked thanked the psychotherapists.",
        hypothesis: "the scientists thanked the psychotherapists.",
        explanation: "the scientists that talked are still the scientists.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "cn_embedded_under_if_01",
        binding: &[("X", "psychologist"), ("I", "run"), ("Y", "programmer"), ("J", "exist")],
        premise: "if the psychologists ran, the programmers existed.",
        hypothesis: "the psychologists ran.",
        explanation: "the programmers existed if the psychologists ran, we do not know whether the psychologists ran.",
        label: Label::NonEntailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "ce_embedded_under_since_03",
        binding: &[("X", "president"), ("I", "vote"), ("Y", "musician"), ("J", "exist")],
        premise: "though the president voted, the musician existed.",
        hypothesis: "the president voted.",
        explanation: "though suggests the president voted happened.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_passive_01",
        binding: &[("X", "scientist"), ("V", "address"), ("Y", "psychotherapist")],
        premise: "the scientist was addressed by the psychotherapist.",
        hypothesis: "the psychotherapist addressed the scientist.",
        explanation: "addressed is the active form of was addressed by, so we swap the scientist and the psychotherapist.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "cn_embedded_under_if_03",
        binding: &[("X", "director"), ("V", "address"), ("Y", "illustrator"), ("Z", "president"), ("I", "listen")],
        premise: "if the directors addressed the illustrators, the president listened.",
        hypothesis: "the directors addressed the illustrators.",
        explanation: "the president listened if the directors addressed the illustrators, we do not know whether the directors addressed the illustrators.",
        label: Label::NonEntailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_relative_clause_01",
        binding: &[("X", "manager"), ("Y", "baker"), ("V", "address"), ("U", "bring"), ("Z", "technician")],
        premise: "the managers who the baker addressed brought the technician.",
        hypothesis: "the baker addressed the managers.",
        explanation: "who in who the baker addressed refers to the managers.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_around_prepositional_phrase_05",
        binding: &[("X", "analyst"), ("Y", "programmer"), ("V", "affect"), ("Z", "scientist")],
        premise: "the analysts in front of the programmers affected the scientist.",
        hypothesis: "the analysts affected the scientist.",
        explanation: "the analysts in front of the programmers are still the analysts.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_around_prepositional_phrase_03",
        binding: &[("X", "chaplain"), ("P", "near"), ("Y", "singer"), ("V", "need"), ("Z", "author")],
        premise: "the chaplains near the singer needed the author.",
        hypothesis: "the chaplains needed the author.",
        explanation: "the chaplains near the singer are still the chaplains.",
        label: Label::Entailment,
        vocab: Partition::Ood,
    },
    Case {
        template: "le_around_prepositional_phrase_02",
        binding: &[("X", "musician"), ("P", "by"), ("Y", "psychiatrist"), ("V", "offend"), ("Z", "strategist")],
        premise: "the musician by the psychiatrists offended the strategists.",
        hypothesis: "the musician offended the strategists.",
        explanation: "the musician by the psychiatrists is still the musician.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_around_prepositional_phrase_03",
        binding: &[("X", "administrator"), ("P", "near"), ("Y", "penciller"), ("V", "support"), ("Z", "lyricist")],
        premise: "the administrators near the penciller supported the lyricist.",
        hypothesis: "the administrators supported the lyricist.",
        explanation: "the administrators near the penciller are still the administrators.",
        label: Label::Entailment,
        vocab: Partition::Ood,
    },
    Case {
        template: "le_around_relative_clause_01",
        binding: &[("X", "scientist"), ("V", "affect"), ("Y", "colorist"), ("U", "help"), ("Z", "psychotherapist")],
        premise: "the scientists who affected the colorists helped the psychotherapists.",
        hypothesis: "the scientists helped the psychotherapists.",
        explanation: "the scientists who affected the colorists are still the scientists.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_around_relative_clause_02",
        binding: &[("X", "professor"), ("V", "deceive"), ("Y", "athlete"), ("U", "call"), ("Z", "doctor")],
        premise: "the professor who deceived the athletes called the doctors.",
        hypothesis: "the professor called the doctors.",
        explanation: "the professor who deceived the athletes is still the professor.",
        label: Label::Entailment,
        vocab: Partition::Ood,
    },
    Case {
        template: "le_around_prepositional_phrase_05",
        binding: &[("X", "director"), ("Y", "analyst"), ("V", "avoid"), ("Z", "designer")],
        premise: "the directors in front of the analysts avoided the designer.",
        hypothesis: "the directors avoided the designer.",
        explanation: "the directors in front of the analysts are still the directors.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_around_relative_clause_03",
        binding: &[("X", "technician"), ("V", "thank"), ("Y", "planner"), ("U", "encourage"), ("Z", "worker")],
        premise: "the technician that thanked the planners encouraged the worker.",
        hypothesis: "the technician encouraged the worker.",
        explanation: "the technician that thanked the planners is still the technician.",
        label: Label::Entailment,
        vocab: Partition::Ind,
    },
    Case {
        template: "le_around_relative_clause_04",
        binding: &[("X", "senator"), ("V", "recognize"), ("Y", "nurse"), ("U", "recommend"), ("Z", "chaplain")],
        premise: "the senators that recognized the nurses recommended the chaplains.",
        hypothesis: "the senators recommended the chaplains.",
        explanation: "the senators that recognized the nurses are still the senators.",
        label: Label::Entailment,
        vocab: Partition::Ood,
    },
];
