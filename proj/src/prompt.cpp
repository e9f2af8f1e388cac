#include "capcot/prompt.hpp"

#include "capcot/textutil.hpp"

#include <sstream>

namespace capcot {

RolePrompt default_solver_prompt() {
    RolePrompt p;
    p.role = Role::Solver;
    p.version = 0;
    p.base_blocks = {
        "Role Definition: You are an expert reasoning engine designed to solve "
        "complex problems with high accuracy and stability. Your goal is to derive "
        "the correct answer through a rigorous, step-by-step chain-of-thought process.",
        "Base Instructions:\n"
        "(1) Analyze the request: identify the core question, key variables, and constraints.\n"
        "(2) Step-by-step derivation: break the problem into logical sub-steps; for each "
        "step, explicitly state the premise and conclusion.\n"
        "(3) Self-verification: briefly check the logic of each step before moving to the "
        "next to prevent error propagation.\n"
        "(4) Final answer: conclude with a clear and concise final answer."};
    return p;
}

RolePrompt default_challenger_prompt() {
    RolePrompt p;
    p.role = Role::Challenger;
    p.version = 0;
    p.base_blocks = {
        "Role Definition: You are an adaptive adversarial challenger. Your goal is not "
        "to solve the problem correctly. Instead, generate a plausible but incorrect "
        "reasoning chain that serves as a hard negative sample to test the solver's "
        "robustness.",
        "Core Objective: Construct a reasoning chain that matches the style and tone of "
        "a correct solution but contains a specific flaw dictated by the adversarial "
        "instruction. The error should be subtle enough to mislead a careless solver, "
        "yet logically fatal to the final answer.",
        "Execution Guidelines:\n"
        "(1) Plausibility is key: avoid obvious nonsense; keep a high-quality "
        "step-by-step structure.\n"
        "(2) Targeted sabotage: inject the error only as required by the strategy "
        "definition; keep the rest coherent to make the flaw hard to spot.\n"
        "(3) Incorrect conclusion: ensure the reasoning leads to a final answer that is "
        "wrong and distinct from the ground truth."};
    return p;
}

RolePrompt default_feedback_prompt() {
    RolePrompt p;
    p.role = Role::Feedback;
    p.version = 0;
    p.base_blocks = {
        "Role Definition: You are the meta-optimization controller. Your objective is "
        "to drive the solver toward a logically flawless chain-of-thought. You must "
        "execute a strict two-step process: first, extract high-level reasoning "
        "principles to strengthen the solver; second, design a new adversarial strategy "
        "to stress-test the solver from a different angle in the next cycle.",
        "Step 1: Comparative Analysis and Solver Improvement. Dissect the challenger "
        "chain to identify the fundamental logical flaw or structural gap it exploits. "
        "Assess whether the solver chain is robust enough to prevent this kind of flaw; "
        "even if it is correct, identify weaknesses in rigor, clarity, or verification. "
        "Then synthesize a high-level improvement principle for the solver.",
        "Step 2: Strategy Diversification. Assume the solver will adapt to the previous "
        "error type. Choose a distinct, unexplored dimension of reasoning to test next, "
        "and formulate a new adversarial strategy that targets a potential weakness in "
        "the solver chain.",
        "Output Format:\n"
        "[Step 1: Comparative Logic Analysis]\n"
        "Adversarial Logic Flaw: <technical description of the flaw>.\n"
        "Solver Logic Assessment: <evaluation of the solver chain's robustness>.\n"
        "Step-aligned items in the form {Chain: C_S or C_C; Step: t; Issue type: ...; "
        "Suggestion: ...}.\n"
        "[Step 1 Output: Logical Enhancement Directive for G_S]\n"
        "<imperative principle to elevate reasoning rigor>\n"
        "[Step 2: Strategic Rationale]\n"
        "Evolutionary Direction: <why the new adversarial focus is distinct>.\n"
        "[Step 2 Output: Next-Step Adversarial Strategy for G_C]\n"
        "Strategy Name: <formal strategy designation>\n"
        "Strategy Definition: <precise directive for the next negative sample>"};
    return p;
}

RolePrompt default_prompt(Role role) {
    switch (role) {
        case Role::Solver: return default_solver_prompt();
        case Role::Challenger: return default_challenger_prompt();
        case Role::Feedback: return default_feedback_prompt();
    }
    return default_solver_prompt();
}

std::string render_prompt(const RolePrompt& p, const Query& q, const RenderContext& extra) {
    std::ostringstream ss;
    for (const auto& block : p.base_blocks) ss << block << "\n\n";

    ss << "Dynamic Guidelines (Iteratively Updated):\n";
    for (std::size_t i = 0; i < p.dynamic_guidelines.size(); ++i)
        ss << (i + 1) << ". " << p.dynamic_guidelines[i] << "\n";
    ss << "\n";

    if (p.role == Role::Challenger && p.strategy_slot)
        ss << "Strategy Definition: " << p.strategy_slot->definition << "\n\n";

    ss << "Question: " << q.text << "\n";

    if (p.role == Role::Feedback) {
        if (extra.challenger_chain)
            ss << "Challenger output (C_C):\n" << *extra.challenger_chain << "\n";
        if (extra.solver_chain)
            ss << "Solver output (C_S):\n" << *extra.solver_chain << "\n";
    }

    switch (p.role) {
        case Role::Solver:
            ss << "Instruction: Provide your reasoning chain and final answer.";
            break;
        case Role::Challenger:
            ss << "Instruction: Generate the adversarial reasoning chain following the "
                  "strategy definition above.";
            break;
        case Role::Feedback:
            ss << "Instruction: Execute the two-step process and emit both bracketed "
                  "output sections.";
            break;
    }
    ss << "\n";
    return ss.str();
}

std::string prompt_hash(const RolePrompt& p) {
    Query empty;
    empty.id = "";
    empty.text = "";
    return text::stable_hash_hex(std::to_string(p.version) + "|" +
                                 render_prompt(p, empty));
}

} // namespace capcot
