#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "evorank/errors.hpp"

namespace evorank {

// Operator prompt templates. The canonical copies live as text files under
// templates/; the strings below are the compiled-in defaults and must stay
// byte-identical to those files. Placeholders use {name} syntax.

inline constexpr std::string_view gradient_estimation_template =
    R"TPL(# Role and Goal

You are an expert Prompt Engineer specializing in optimizing inputs for ranking and information retrieval models. Your objective is to analyze the provided examples of failure from my current reranker model, diagnose the weaknesses in its current prompt, and craft superior, revised prompts that will improve its performance.

# Model Context

I am using a reranker model that takes three inputs: a **`Prompt`**, a **`Query`**, and a **`Document`**.

The model's function is to evaluate how relevant the `Document` is to the `Query` based on the guidance provided in the `Prompt`. It returns a relevance score, where a higher score indicates higher relevance.

# Current Prompt and Problem Statement

The current prompt I am using is:
`"{current_prompt}"`

For a given `Query`, the model often assigns a higher score to an irrelevant document (**Negative Document**) than to the ideal, relevant document (**Positive Document**). My goal is to fix this by improving the prompt.

# Error Examples for Analysis

Below are concrete examples where the current model fails. In each case, a `Negative Document` incorrectly receives a higher score than the `Positive Document`. Please analyze these patterns to identify the flaw in the current prompt.

{error_string}

# Core Task & Required Output

Give {num_gradients} reasons why the current prompt could have gotten these examples wrong. Wrap each reason with <START> and <END>
)TPL";

inline constexpr std::string_view gradient_application_template =
    R"TPL(# Role and Goal

You are an expert Prompt Engineer tasked with improving a reranker model's performance. The reranker model's job is to score how relevant a **`Document`** is to a **`Query`**, **based on the prompt I provide**. Your objective is to generate new, improved prompts for the reranker model based on a provided analysis of a failing prompt and its error examples.

# Background Information

You will be given three pieces of information: the current prompt that performed poorly, the specific examples it failed on, and an analysis of why it failed.

### 1. The Current Prompt

This is the prompt that needs improvement.
`"{current_prompt}"`

### 2. Error Examples

The current prompt failed on the following examples:
{error_str}

### 3. Analysis of the Problem

Based on the errors, the key weaknesses of the current prompt were identified as follows:
{gradient_str}

# Core Task & Required Output

Based on all the information provided above (the original prompt, its errors, and the analysis), please perform the following tasks:

1.  **Generate Prompts:** Write **{steps_per_gradient}** different and improved prompts that aim to overcome the identified weaknesses.
2.  **Encourage Diversity:** Each prompt should be distinct from the others.
3.  **Formatting:** Wrap each new prompt individually with `<START>` and `<END>`.
)TPL";

inline constexpr std::string_view crossover_template =
    R"TPL(# Role and Goal

You are an expert Prompt Engineer specializing in synergistic prompt design. Your objective is to analyze two distinct prompts, identify the core reasons for their unique successes, and then synthesize these insights into a superior, hybrid prompt that inherits the strengths of both.

# Contrastive Analysis of Two Prompts

We have analyzed two prompts, A and B, and have found specific examples where one succeeded while the other failed. This contrastive analysis reveals the unique strengths of each.

### 1. Prompt A's Strengths (Where A Succeeded and B Failed)

**Prompt A:** `"{prompt_a}"`

In the following examples, **Prompt A correctly identified the Positive Document, whereas Prompt B failed to do so.** These examples highlight the winning strategy of Prompt A.
{examples_a_wins}

### 2. Prompt B's Strengths (Where B Succeeded and A Failed)

**Prompt B:** `"{prompt_b}"`

In the following examples, **Prompt B correctly identified the Positive Document, whereas Prompt A failed to do so.** These examples highlight the winning strategy of Prompt B.
{examples_b_wins}

# Core Task & Required Output

Your task is to create a new, more powerful prompt by combining the winning strategies of both A and B.

1.  **Analyze Prompt A's Winning Strategy:** Based on the first set of examples, what specific phrasing, instruction, or principle in Prompt A allows it to succeed where B fails?
2.  **Analyze Prompt B's Winning Strategy:** Similarly, based on the second set of examples, what is the core strength of Prompt B that allows it to handle cases that A could not?
3.  **Generate Hybrid Prompts:** Synthesize these two winning strategies into **{num_crossovers}** distinct, new prompts. Each new prompt must be a cohesive instruction set that aims to solve all provided examples by intelligently combining the best of A and B.
4.  **Formatting:** Wrap each new prompt individually with `<START>` and `<END>`.
)TPL";

struct Templates {
    std::string gradient_estimation{gradient_estimation_template};
    std::string gradient_application{gradient_application_template};
    std::string crossover{crossover_template};
};

// Single-pass {name} substitution. Unknown placeholders and braces inside
// substituted values are left untouched.
inline std::string fill_template(std::string_view tmpl,
                                 const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            const std::size_t close = tmpl.find('}', i + 1);
            if (close != std::string_view::npos) {
                const std::string key(tmpl.substr(i + 1, close - i - 1));
                const auto it = values.find(key);
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i];
        ++i;
    }
    return out;
}

// Loads overrides from a directory holding gradient_estimation.txt,
// gradient_application.txt and crossover.txt. Missing files keep the
// compiled-in default.
inline Templates load_templates(const std::filesystem::path& dir) {
    Templates t;
    const auto read = [&](const char* file, std::string& target) {
        const auto path = dir / file;
        if (!std::filesystem::exists(path)) return;
        std::ifstream in(path, std::ios::binary);
        if (!in) throw io_error("cannot read template file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        target = buf.str();
    };
    read("gradient_estimation.txt", t.gradient_estimation);
    read("gradient_application.txt", t.gradient_application);
    read("crossover.txt", t.crossover);
    return t;
}

} // namespace evorank
