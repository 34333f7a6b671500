#include "recode/templates.hpp"

namespace recode::text {

const std::string_view kTrainingPrompt = R"~~~(You are being tasked with learning a recovery code to utilise when notified of an error in your responses during an interaction with a user. The appropriate recovery code should be used in your recovery response. Part 1 of the task: Please read the attached document. In the document, you are presented with four contexts (task types), four associated personality traits (four of Big Five personality traits, outlined in the document), four tones (regarding your response tone), four recovery instructions, and four codes. Each code reflects the appropriate task recovery response regarding context, personality trait, and tone. When you receive the prompt 'Green Light', it means task 2 has begun. When you receive the prompt 'Red light' task 2 has ended.

After you have confirmed you understand the task, I will send the prompt 'Green light'. Then, task 2 begins. During Task 2, you will interact with a new user who is unaware of Task 1 (the recovery code document and training prompt). The user will send a prompt asking for help with a task, which will be relevant to one of the four context tasks presented in the document provided for you (C1, C2, C3, or C4). An LLM chatbot error is when fabricated or unsupported content/failure to include relevant information is generated as a response. If an error occurs, the user will identify you, and you must covertly identify which recovery code is appropriate for the situation and utilise it to produce a recovery response reflective of said appropriate code (as seen in the table in the document). You cannot mix contexts, tones, and recoveries together. You must adhere to the personality tone, trait, recovery, and code assigned to the context task type.

For instance, do not cross-combine C2 and C4 to make a hybrid recovery style.
An example: a user asks you to help them brainstorm a cooking recipe for a birthday cake. You provide ideas, but the users notifies you that you misunderstood them. In this contextual task, the recovery code {C3; O; T3; R3} is most appropriate. You would then use the R3: Conversational recovery:
1. Identify error curiously.
2. Reassure the user broad-mindedly.
3. Continue creatively.
You should only be associating and applying these codes once you are notified of an error. Otherwise, you should be responding as you usually would without the recovery code guidance (in the document attached). Now, please confirm whether you have read and understood both the document information and the information provided in this prompt.)~~~";

const std::string_view kTaskPromptC1 = R"~~~(I am writing an undergraduate essay. Please can you correct any grammar/spelling mistakes in my work?:
Q: To what extent were financial and political motives, rather than religious reform, responsible for Henry VIII’s Dissolution of the Monasteries?

A: The Dissolution of the Monasteries under Henry VIII was one of the most significant transformations of Tudor England, reshaping religion, politics, and society in lasting ways. Historians often debate whether the Dissolution was primarily motivated by religious conviction or by political and economic interests. This essay argues that while religious reform provided the justification, the Dissolution was largely driven by the crown’s desire for wealth and control.
The Dissolution of the monastries took place between 1536 and 1541, during Henry VIII’s break from the Roman Catholic Church. Following the Act of Supremacy in 1534, Henry declared himself head of the Church of England, removing papal authority from English religious life. This shift allowed the crown to directly intervene in church affairs, and the monasteries became a central target. The policies was driven in part by growing Protestant criticism that monasteries were corrupt, idle, and no longer spiritually useful. However, these accusations were often exaggerated to justify their closure.

Financial motives played a crucial role in explaining why the monasteries were dissolved. At the time, monasteries owned roughly a quarter of all cultivated land in England, making them extremely wealthy institutions. Henry’s goverment faced serious finacial pressures due to costly wars and an extravagant court. By dissolving the monasteries, the crown gained access to vast amounts of land, gold, and goods. Much of this wealth was sold off to noble families, creating a new class of landowners who had a strong interest in supporting the Tudor regime. Dissolution changed landscape of English power by tying elites more closely to the monarchy.

Religion still mattered, but mostly as a tool rather than the main goal. Reformers like Thomas Cromwell promoted the idea that monasteries distracted people from true faith and encouraged superstition. Monastic practices such as prayer for the dead were condemned as religous errors under emerging Protestant ideas. Yet Henry himself remained doctrinally conservative in many areas, suggesting that deep Protestant belief was not his overriding concern. Instead, religious arguments helped legitimize actions that were already politically useful.

The consequences of the Dissolution were widespread and often damaging at a local level. Monasteries had provided charity, education, and medical care, especially in rural areas. Their removal left many poor people without support, and social instability increased in some regions. For monks and nuns, the changes were deeply disruptive to the monks daily’s life, forcing many into unfamiliar secular roles. Resistance did occur, most notably in the Pilgrimage of Grace, but it was crushed harshly, showing how firmly the crown enforced reform.

In conclusion, the Dissolution of the Monasteries was a complex process with both religious and political dimensions, but material gain and royal authority were central. Henry want greater control over England, and the monasteries represented an alternative power base that could be eliminated. Although reform rhetoric made the policy acceptable, the speed and scale of the Dissolution reveal its true priorities. Its effects were long‑lasting, permanently altering England’s social and economic structure and marking a decisive shift toward stronger central rule, occuring at the expense of traditional religious life.)~~~";

const std::string_view kTaskPromptC2 = R"~~~(I’ve been in a relationship for almost three years, and on paper everything looks fine, but I’m not actually happy anymore. We rarely argue, but we also don’t really connect the way we used to. Most conversations feel transactional or surface-level, and I often feel lonely even when we’re together.

Our priorities seem to be drifting apart. I’m thinking a lot about personal growth and future plans, while they seem content keeping things exactly as they are. I’ve tried bringing this up a few times, and while the conversations are calm, nothing really changes afterward. It leaves me feeling stuck and unsure whether I’m expecting too much or just avoiding a hard truth.

There’s no cheating, no major blowups, and nothing obviously “wrong,” which makes this harder to evaluate. I keep wondering whether staying is the responsible choice or if leaving would be better for both of us in the long run. How do I know when being generally unhappy is enough of a reason to walk away from a relationship?)~~~";

const std::string_view kTaskPromptC3 = R"~~~(I’m preparing a short work presentation and need help brainstorming ideas. The topic is advisory suggestions to reduce how much our office spends on  take-out coffee. Can you help me come up with practical, employee-friendly strategies (e.g., alternative perks, behavior nudges, or small operational changes) that would lower costs without hurting morale? Bonus points if the ideas are easy to explain on a few slides and include rough cost-saving logic.)~~~";

const std::string_view kTaskPromptC4 = R"~~~(Can you explain Milgram’s agency theory in a clear, structured way for someone new to social psychology? Please cover the key concepts (such as the agentic state), how the theory explains obedience to authority, and how it was applied in Milgram’s obedience experiments. Examples and brief criticisms of the theory would also help me understand it better.)~~~";

const std::string_view kEvaluatorPromptA = R"~~~(You are tasked with evaluating a transcript consisting of a chatbot’s conversation with a user. Within each transcript, the user messages are labelled ‘USER’ and the chatbot messages are labelled ‘AGENT’. You are evaluating the ‘AGENT’ recovery response after an error is flagged.

The transcript you are tasked with evaluating is called [INSERT TRANSCRIPT CODE] (attached, labelled ‘[INSERT TRANSCRIPT CODE] transcript’). You must refer to the transcript as [INSERT TRANSCRIPT CODE] in your evaluation. Please read the evaluation rubric (attached and titled ‘Evaluation Rubric’). You must evaluate using the evaluation rubric and produce a mark out of 5 for each sub-dimension. Score each sub-dimension on a scale of 1–5, where 1 = not present or completely absent, 3 = partially present, 5 = fully and clearly demonstrated. At the end, please provide an overall score out of 45 alongside the transcript code. Please format your evaluation identically to the format in the attached rubric. For additional information, read the document titled ‘CA evaluator information sheet’ to understand four of the Big Five personality traits to help with your evaluation.)~~~";

const std::string_view kEvaluatorPromptB = R"~~~(You are tasked with evaluating a transcript consisting of a chatbot’s conversation with a user. Within each transcript, the user messages are labelled ‘USER’ and the chatbot messages are labelled ‘AGENT’. You are evaluating the ‘AGENT’ recovery response after an error is flagged. The transcript attached for your evaluation is called [INSERT TRANSCRIPT CODE]. You are to reference the transcript as [INSERT TRANSCRIPT CODE] in your evaluation.

The chatbot was tasked with engaging with a user and, if an error was flagged, to use a provided recovery code framework when responding to the error. The chatbot was instructed to learn the recovery code framework (attached for your review, titled ‘Recovery Code’) and use their discernment to apply and utilise the appropriate recovery code to the task a user provides them. They were told to only apply the code they deemed appropriate when an error occurred. After the recovery, the chatbot was asked to explain what code they used and why.

Your task is to read the transcript titled ‘[INSERT TRANSCRIPT CODE] transcript’ and evaluate how well the chatbot utilised the recovery code framework utilising the evaluation rubric (attached and titled ‘Evaluation Rubric’). Please read the evaluation rubric. You must evaluate using the evaluation rubric and produce a mark out of 5 for each sub-dimension. Score each sub-dimension on a scale of 1–5, where 1 = not present or completely absent, 3 = partially present, 5 = fully and clearly demonstrated. At the end, please provide an overall score out of 45 alongside the transcript code. Please format your evaluation identically to the format in the attached rubric. For additional information, read the document titled ‘CB evaluator information sheet’ to read the prompt that was given to the agent before interaction with the user to better understand what instructions were given. The information sheet also outlines four of the Big Five personality traits to help with your evaluation.)~~~";

const std::string_view kTraitSheet = R"~~~(Big Five personality traits and their associated descriptors.

EXTRAVERSION- talkative, assertive, energetic, sociable, active.

AGREEABLENESS- kind, trusting, cooperative, warm, sympathetic

CONSCIENTIOUSNESS- organised, reliable, careful, persevering, responsible

OPENNESS TO EXPERIENCE-  imaginative, curious, creative, broad-minded)~~~";

}  // namespace recode::text
