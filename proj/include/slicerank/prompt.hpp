#pragma once

#include <string>
#include <string_view>

#include "slicerank/sample.hpp"

namespace slicerank {

/// Few-shot instruction template for conditional similarity judgment. The
/// placeholders {sentence1}, {sentence2} and {condition} are filled verbatim.
inline constexpr std::string_view kPromptTemplate =
    R"(Judge the semantic similarity between Sentence 1 and Sentence 2 based completely on the given Condition.
The final output must be exactly in this format: the similarity judgment ('yes' or 'no') followed by the score in parentheses, wrapped in <answer></answer> tags. Examples: <answer>yes(4)</answer>, <answer>no(1)</answer>. Include no other text, tags, or explanations.

To arrive at this output, follow these two steps:
Step 1: Binary Judgment. Determine if the sentences are 'similar' ('yes') or 'not similar' ('no').
  - 'similar': The sentences are roughly, mostly, or completely equivalent under the condition.
  - 'not similar': The sentences are dissimilar under the condition.
Step 2: Fine-grained Score. Assign an integer score based on Step 1:
  - For a 'yes' judgment:
    - 5: The two sentences are completely equivalent as they mean the same thing with respect to the condition.
    - 4: The two sentences are mostly equivalent, but some unimportant details differ with respect to the condition.
    - 3: The two sentences are roughly equivalent, but some important information differs or is missing with respect to the condition.
  - For a 'no' judgment:
    - 2: The two sentences are dissimilar, but are on a similar topic with respect to the condition or shares a close semantic relationship. This applies when items are clearly different, but not direct opposites.
    - 1: The two sentences are dissimilar with respect to the condition, representing a direct opposition or a clear, unrelated difference. (e.g., 'man' vs. 'woman').
Here are some examples:

Example 1:
<Sentence1>: A girl is cooking in a kitchen and a man is standing next to her.
<Sentence2>: A man sitting with a pizza in his hand in front of pizza on the table.
<Condition>: The number of people.
<answer>no(1)</answer>
Explanation: The first sentence mentions two people, while the second sentence mentions only one person.

Example 2:
<Sentence1>: A wood table sitting by a wood framed bed with a lamp on it.
<Sentence2>: A microwave, refrigerator, television, and wooden drawers sit in the corner of a bedroom.
<Condition>: The room type.
<answer>yes(5)</answer>
Explanation: We can infer from the two sentences that the room type are both bedroom.

Example 3:
<Sentence1>: A small crowd gathered around the injured person.
<Sentence2>: A crowd jumps up and down to the tunes played by an artist.
<Condition>: The number of people
<answer>yes(3)</answer>
Explanation: While both sentences mention crowds, it is important and unclear how many people there are.

Now, apply these steps to the following sentences:

<Sentence1>: {sentence1}
<Sentence2>: {sentence2}
<Condition>: {condition}
)";

/// Single left-to-right pass, so braces inside substituted text are never
/// re-expanded.
inline std::string render_prompt(const Sample& sample) {
  std::string out;
  out.reserve(kPromptTemplate.size() + sample.text1.size() + sample.text2.size() + sample.condition.size());
  std::string_view rest = kPromptTemplate;
  while (!rest.empty()) {
    auto open = rest.find('{');
    if (open == std::string_view::npos) {
      out.append(rest);
      break;
    }
    out.append(rest.substr(0, open));
    rest.remove_prefix(open);
    if (rest.starts_with("{sentence1}")) {
      out += sample.text1;
      rest.remove_prefix(11);
    } else if (rest.starts_with("{sentence2}")) {
      out += sample.text2;
      rest.remove_prefix(11);
    } else if (rest.starts_with("{condition}")) {
      out += sample.condition;
      rest.remove_prefix(11);
    } else {
      out += '{';
      rest.remove_prefix(1);
    }
  }
  return out;
}

}  // namespace slicerank
