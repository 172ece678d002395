#include "oats/summarizer.h"

namespace oats {

// Version kStopwordListVersion. Function words plus a few reporting verbs
// that carry no topical content in abstracts.
const StopwordSet &DefaultStopwords() {
  static const StopwordSet words = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am",
      "an", "and", "any", "are", "aren't", "as", "at", "be", "because", "been",
      "before", "being", "below", "between", "both", "but", "by", "can", "cannot",
      "could", "couldn't", "did", "didn't", "do", "does", "doesn't", "doing", "don't",
      "down", "during", "each", "either", "et", "al", "etc", "few", "for", "from",
      "further", "had", "hadn't", "has", "hasn't", "have", "haven't", "having", "he",
      "her", "here", "hers", "herself", "him", "himself", "his", "how", "however",
      "i", "if", "in", "into", "is", "isn't", "it", "it's", "its", "itself", "just",
      "may", "me", "might", "more", "most", "must", "my", "myself", "no", "nor", "not",
      "of", "off", "on", "once", "only", "or", "other", "ought", "our", "ours",
      "ourselves", "out", "over", "own", "same", "shall", "she", "should", "shouldn't",
      "so", "some", "such", "than", "that", "that's", "the", "their", "theirs", "them",
      "themselves", "then", "there", "there's", "these", "they", "this", "those",
      "through", "thus", "to", "too", "under", "until", "up", "upon", "us", "very",
      "was", "wasn't", "we", "were", "weren't", "what", "when", "where", "whether",
      "which", "while", "who", "whom", "whose", "why", "will", "with", "within",
      "without", "would", "wouldn't", "yet", "you", "your", "yours", "yourself",
      "yourselves",
  };
  return words;
}

}  // namespace oats
