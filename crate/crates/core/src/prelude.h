/*@ axiomatic ValidStr {
  @   predicate valid_str(char *s) = \valid(s) && (*s == '\0' || valid_str(s + 1));
  @ }
  @*/

/*@ axiomatic StrLen {
  @   logic integer strlen(char *s) = *s == '\0' ? 0 : 1 + strlen(s + 1);
  @   axiom strlen_nonneg: \forall char *s; valid_str(s) ==> strlen(s) >= 0;
  @ }
  @*/

/*@ axiomatic StrChrNul {
  @   logic char *strchrnul(char *s, char c) = *s == c ? s : *s == '\0' ? s : strchrnul(s + 1, c);
  @ }
  @*/

/*@ axiomatic StrChr {
  @   logic char *strchr(char *s, char c) = *s == c ? s : *s == '\0' ? \null : strchr(s + 1, c);
  @ }
  @*/

/*@ axiomatic StrSpn {
  @   logic integer strspn(char *s, char *accept) =
  @     *s != '\0' && strchr(accept, *s) != \null ? 1 + strspn(s + 1, accept) : 0;
  @ }
  @*/

/*@ axiomatic StrCSpn {
  @   logic integer strcspn(char *s, char *reject) =
  @     *s != '\0' && strchr(reject, *s) == \null ? 1 + strcspn(s + 1, reject) : 0;
  @ }
  @*/

/*@ axiomatic StrNLen {
  @   logic integer strnlen(char *s, integer n) =
  @     n <= 0 || *s == '\0' ? 0 : 1 + strnlen(s + 1, n - 1);
  @ }
  @*/

/*@ axiomatic StrPBrk {
  @   logic char *strpbrk(char *s, char *accept) =
  @     *s == '\0' ? \null : strchr(accept, *s) != \null ? s : strpbrk(s + 1, accept);
  @ }
  @*/

/*@ axiomatic IsSpace {
  @   predicate is_space(char c) = c == ' ' || 9 <= c <= 13;
  @ }
  @*/

/*@ axiomatic SkipSpaces {
  @   logic char *skip_spaces(char *s) = is_space(*s) ? skip_spaces(s + 1) : s;
  @ }
  @*/
